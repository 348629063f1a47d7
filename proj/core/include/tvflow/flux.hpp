#pragma once

#include <vector>

#include "tvflow/space.hpp"

namespace tvflow {

// Antisymmetric g on the support pairs of a space, stored once per edge in the
// orientation edges()[k].a -> edges()[k].b.
struct FluxField {
  std::vector<double> g;

  static FluxField zero(const RandomWalkSpace& space) {
    return {std::vector<double>(space.edges().size(), 0.0)};
  }
  double at(const RandomWalkSpace& space, int edge, int from) const {
    return space.edges()[edge].a == from ? g[edge] : -g[edge];
  }
};

// div z(x) = sum_y z(x, y) K(x, y).
StateFunction divergence(const RandomWalkSpace& space, const FluxField& z);

double max_abs(const FluxField& z);

}  // namespace tvflow
