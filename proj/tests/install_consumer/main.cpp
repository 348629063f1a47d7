#include <cmath>

#include "tvflow/geometry.hpp"

int main() {
  auto s = tvflow::from_weighted_graph({{"a", "b", 1.0}, {"b", "c", 2.0}});
  auto e = tvflow::StateSet::of(s, {"a"});
  return std::abs(tvflow::perimeter_value(s, e) - 1.0) < 1e-15 ? 0 : 1;
}
