#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvflow/flux.hpp"
#include "tvflow/space.hpp"

namespace tvflow {

inline constexpr int default_exhaustive_limit = 22;
inline constexpr double default_certificate_tolerance = 1e-7;

enum class CheegerMode { subset_of_omega, global_balanced };

struct CheegerReport {
  double value = 0.0;
  StateSet witness;
  CheegerMode mode = CheegerMode::subset_of_omega;
  bool exact = true;
  int iterations = 0;
};

struct CheegerOptions {
  int exhaustive_limit = default_exhaustive_limit;
  double tie_tolerance = 1e-12;
};

// Minimum of P(E)/nu(E) over nonempty E inside omega. Ties: smaller volume,
// then lexicographically smaller member list.
CheegerReport cheeger_subset_exact(const RandomWalkSpace& space, const StateSet& omega,
                                   const CheegerOptions& opts = {});
CheegerReport cheeger_subset_dinkelbach(const RandomWalkSpace& space, const StateSet& omega);

enum class GlobalMethod { exhaustive, ipm };

struct IpmOptions {
  int restarts = 4;
  int max_iters = 60;
  std::uint64_t seed = 1;
};

// Balanced Cheeger constant over 0 < nu(D) <= nu(X)/2. The ipm result is an upper bound.
CheegerReport cheeger_global(const RandomWalkSpace& space, GlobalMethod method,
                             const CheegerOptions& opts = {}, const IpmOptions& ipm = {});

enum class CalibrabilityMethod { exhaustive, lp, dinkelbach };

struct CalibrabilityResult {
  bool calibrable = false;
  double lambda = 0.0;                  // P(omega)/nu(omega)
  std::optional<StateSet> witness;      // subset with a smaller ratio
  double witness_ratio = 0.0;
  std::optional<FluxField> flux;        // lp method: g on pairs inside omega
  double residual = 0.0;                // lp method: worst equation residual
};

CalibrabilityResult is_calibrable(const RandomWalkSpace& space, const StateSet& omega,
                                  CalibrabilityMethod method = CalibrabilityMethod::lp,
                                  double tolerance = default_certificate_tolerance,
                                  const CheegerOptions& opts = {});

bool curvature_necessary_check(const RandomWalkSpace& space, const StateSet& omega, double tolerance = 1e-12);

struct MedianInterval {
  double lo = 0.0;
  double hi = 0.0;
};
MedianInterval median_set(const RandomWalkSpace& space, const StateFunction& u);
bool zero_median(const RandomWalkSpace& space, const StateFunction& u, double tolerance = 1e-12);

struct EigenpairResiduals {
  double equation = 0.0;  // max_x |sum_y g K + lambda xi|
  double sign = 0.0;      // max |g (u(y) - u(x)) - |u(y) - u(x)||
  double bound = 0.0;     // max(|g| - 1, |xi| - 1, 0)
  double lambda_tv = 0.0; // |TV(u) - lambda|
};

struct EigenpairCertificate {
  double lambda = 0.0;
  StateFunction u;   // normalized, ||u||_1 = 1
  StateFunction xi;
  FluxField g;
  EigenpairResiduals residuals;
};

struct EigenpairResult {
  bool certified = false;
  double scale = 1.0;  // the L1 norm the input was divided by
  EigenpairCertificate certificate;
  std::string failure;          // empty when certified
  StateSet violated;            // states on the source side of the failing cut
  double deficit = 0.0;         // unmet flux requirement
};

EigenpairResult verify_eigenpair(const RandomWalkSpace& space, double lambda, const StateFunction& u,
                                 double tolerance = default_certificate_tolerance);

struct SetEigenpair {
  double lambda = 0.0;
  StateSet set;
  EigenpairCertificate certificate;
};

struct SearchOptions {
  int exhaustive_limit = default_exhaustive_limit;
  std::optional<std::vector<StateSet>> candidates;  // required above the limit
  double tolerance = default_certificate_tolerance;
};

std::vector<SetEigenpair> set_eigenpair_search(const RandomWalkSpace& space, const SearchOptions& opts = {});

std::vector<StateSet> decompose_m(const RandomWalkSpace& space, const StateSet& omega);

struct BalancedPairResult {
  bool certified = false;
  double lambda = 0.0;
  bool omega_calibrable = false;
  bool complement_calibrable = false;
  std::vector<EigenpairResult> family;  // t = 0, 1, 2
};

BalancedPairResult balanced_pair_eigencheck(const RandomWalkSpace& space, const StateSet& omega,
                                            double tolerance = default_certificate_tolerance);

}  // namespace tvflow
