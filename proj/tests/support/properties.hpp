#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tvflow::testing {

struct PropertyOutcome {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;  // largest residual, drift or ratio seen
  std::string first_failure;
};

// Seeded randomized checks on spaces with at most 12 states.
std::vector<PropertyOutcome> run_property_suites(int instances, std::uint64_t seed);

}  // namespace tvflow::testing
