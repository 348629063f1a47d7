#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "tvflow/space.hpp"

namespace tvflow::testing {

// Connected weighted graph on n states: a random spanning tree, extra edges
// with probability density, and optional self-loops.
inline RandomWalkSpace random_space(std::mt19937_64& rng, int n, double density = 0.3) {
  std::uniform_real_distribution<double> weight(0.1, 2.0), coin(0.0, 1.0);
  std::map<std::pair<int, int>, double> w;
  for (int x = 1; x < n; ++x) {
    std::uniform_int_distribution<int> parent(0, x - 1);
    w[{parent(rng), x}] = weight(rng);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng) < density) w[{a, b}] = weight(rng);
  for (int a = 0; a < n; ++a)
    if (coin(rng) < 0.4) w[{a, a}] = weight(rng);
  std::vector<GraphEdge> edges;
  auto id = [](int x) { return "s" + std::to_string(x); };
  for (const auto& [ab, v] : w) edges.push_back({id(ab.first), id(ab.second), v});
  return from_weighted_graph(edges);
}

inline StateFunction random_function(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  StateFunction u(static_cast<std::size_t>(n));
  for (auto& v : u) v = d(rng);
  return u;
}

// Nonempty proper subset when proper is set.
inline StateSet random_set(std::mt19937_64& rng, int n, bool proper = true) {
  std::bernoulli_distribution pick(0.5);
  std::uniform_int_distribution<int> any(0, n - 1);
  for (;;) {
    StateSet s(n);
    for (int x = 0; x < n; ++x)
      if (pick(rng)) s.insert(x);
    if (s.empty()) s.insert(any(rng));
    if (!proper || s.count() < n) return s;
  }
}

}  // namespace tvflow::testing
