#include "tvflow/spectral.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "tvflow/geometry.hpp"

namespace tvflow {

namespace {

void center_and_normalize(const RandomWalkSpace& space, StateFunction& v) {
  double m = mean(space, v);
  for (double& t : v) t -= m;
  double norm = lp_norm(space, v, 2.0);
  if (norm > 0.0)
    for (double& t : v) t /= norm;
}

SpectralGap power_gap(const RandomWalkSpace& space) {
  const int n = space.size();
  StateFunction v(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) v[x] = std::sin(1.0 + 7.0 * x) + 0.1 * x / n;
  center_and_normalize(space, v);
  StateFunction next(v.size());
  for (int it = 0; it < 20000; ++it) {
    // (I + K) / 2 has spectrum in [0, 1]; its top eigenvector off the
    // constants is the slowest mode of I - K.
    for (int x = 0; x < n; ++x) {
      auto cols = space.row_cols(x);
      auto vals = space.row_vals(x);
      double kv = 0.0;
      for (std::size_t k = 0; k < cols.size(); ++k) kv += vals[k] * v[cols[k]];
      next[x] = 0.5 * (v[x] + kv);
    }
    center_and_normalize(space, next);
    double diff = 0.0;
    for (int x = 0; x < n; ++x) diff = std::max(diff, std::abs(next[x] - v[x]));
    v.swap(next);
    if (diff < 1e-12) break;
  }
  SpectralGap out;
  out.gap = dirichlet_energy(space, v);
  out.vector = v;
  out.exact = false;
  return out;
}

}  // namespace

SpectralGap spectral_gap(const RandomWalkSpace& space, int dense_limit) {
  const int n = space.size();
  SpectralGap out;
  out.vector.assign(static_cast<std::size_t>(n), 0.0);
  if (n < 2) return out;
  if (n > dense_limit) return power_gap(space);

  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
  for (int x = 0; x < n; ++x) s(x, x) -= space.loop(x);
  for (const auto& e : space.edges()) {
    double v = e.w / std::sqrt(space.nu(e.a) * space.nu(e.b));
    s(e.a, e.b) -= v;
    s(e.b, e.a) -= v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  out.gap = std::max(0.0, solver.eigenvalues()(1));
  Eigen::VectorXd phi = solver.eigenvectors().col(1);
  for (int x = 0; x < n; ++x) out.vector[x] = phi(x) / std::sqrt(space.nu(x));
  center_and_normalize(space, out.vector);
  return out;
}

}  // namespace tvflow
