#pragma once

#include "tvflow/space.hpp"

namespace tvflow {

struct SpectralGap {
  double gap = 0.0;        // smallest nonzero eigenvalue of I - K
  StateFunction vector;    // nu-mean-zero eigenvector with unit L2(nu) norm
  bool exact = true;       // false when the power-iteration fallback was used
};

// Dense symmetric eigensolver up to dense_limit states, power iteration beyond.
SpectralGap spectral_gap(const RandomWalkSpace& space, int dense_limit = 1500);

}  // namespace tvflow
