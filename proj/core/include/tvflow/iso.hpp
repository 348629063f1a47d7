#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tvflow/space.hpp"

namespace tvflow {

struct IsoBreakpoint {
  double volume = 0.0;
  double min_perimeter = 0.0;
  StateSet witness;  // lexicographically first minimizer
};

struct IsoProfile {
  double total = 0.0;
  std::vector<IsoBreakpoint> breakpoints;  // increasing volume, 0 < v < nu(X)
};

// Exact minimum perimeter at every achievable volume, by enumeration.
IsoProfile iso_profile(const RandomWalkSpace& space, int exhaustive_limit = 22);

// max over breakpoints of v^{(n-1)/n} / P*(v); n = 1 gives max 1 / P*(v).
double best_iso_constant(const IsoProfile& profile, double n);

struct TrialOptions {
  std::uint64_t seed = 1;
  int random_sparse = 64;
  int staircases = 64;
  int max_indicators = 4096;
};

// Functions vanishing off a proper subset: indicators, random sparse
// functions and nested-set staircases.
std::vector<StateFunction> sobolev_trials(const RandomWalkSpace& space, const TrialOptions& opts = {});

struct InequalityReport {
  bool holds = true;
  double worst_ratio = 0.0;  // max of lhs / rhs
  int trials = 0;
};

// ||u||_{n/(n-1)} <= I_n TV(u); the sup norm when n = 1.
InequalityReport sobolev_check(const RandomWalkSpace& space, double n, double iso_constant,
                               const std::vector<StateFunction>& trials, double slack = 1e-9);

// Nonincreasing table, linear between knots and constant beyond them.
class PsiTable {
 public:
  PsiTable() = default;
  explicit PsiTable(std::vector<std::pair<double, double>> knots);
  double operator()(double r) const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

// Running minimum of P*(v) / v, the largest admissible nonincreasing table.
PsiTable psi_from_profile(const IsoProfile& profile);

// Psi(nu(supp u)) ||u||_1 <= TV(u) on every trial; indicator trials give the
// set form nu(A) Psi(nu(A)) <= P(A).
InequalityReport psi_iso_check(const RandomWalkSpace& space, const PsiTable& psi,
                               const std::vector<StateFunction>& trials, double slack = 1e-9);

double dirichlet_constant(double n, double iso_constant);

// ||u||^2_{2n/(n-2)} <= C_n H(u) for n > 2.
InequalityReport dirichlet_sobolev_check(const RandomWalkSpace& space, double n, double c_n,
                                         const std::vector<StateFunction>& trials, double slack = 1e-9);

}  // namespace tvflow
