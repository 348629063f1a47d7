#include "doctest.h"
#include "support/properties.hpp"

TEST_CASE("randomized property suites") {
  auto outcomes = tvflow::testing::run_property_suites(200, 20240917);
  CHECK(outcomes.size() == 9);
  for (const auto& o : outcomes) {
    INFO(o.name << ": worst " << o.worst << " " << o.first_failure);
    CHECK(o.instances == 200);
    CHECK(o.failures == 0);
  }
}
