#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tvflow/space.hpp"

namespace tvflow::cli {

using FixtureParams = std::map<std::string, double>;

struct FixtureInstance {
  std::string name;
  std::string citation;
  FixtureParams params;
  RandomWalkSpace space;
  std::map<std::string, StateSet> sets;  // "omega" is the default marked set
  std::map<std::string, StateFunction> functions;  // "u0" is the default datum
};

struct CheckResult {
  std::string fixture;
  std::string check;
  bool pass = false;
  std::string detail;
};

struct Fixture {
  std::string name;
  std::string citation;
  std::string summary;
  FixtureParams defaults;
  std::function<FixtureInstance(const FixtureParams&)> build;
  std::function<std::vector<CheckResult>(const FixtureInstance&)> check;
};

const std::vector<Fixture>& fixtures();
const Fixture& find_fixture(const std::string& name);

// Unknown parameter names are rejected; missing ones take the defaults.
FixtureInstance make_fixture(const std::string& name, const FixtureParams& params = {});

std::vector<CheckResult> run_selftest(const std::vector<std::string>& names = {});

}  // namespace tvflow::cli
