#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tvflow/flux.hpp"
#include "tvflow/space.hpp"

namespace tvflow {

enum class ProxMethod {
  parametric_cut,  // exact divide-and-conquer over minimum cuts
  primal_dual,     // accelerated Chambolle-Pock on the saddle form
};

struct ProxOptions {
  ProxMethod method = ProxMethod::parametric_cut;
  double tolerance = 0.0;  // gap threshold; 0 selects 1e-9 (1 + ||f||)
  int max_iters = 200000;
  const FluxField* warm_start = nullptr;
};

struct ProxResult {
  StateFunction u;
  FluxField z;  // u = f + tau div z
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

// argmin TV(u) + ||u - f||^2_{L2(nu)} / (2 tau)
ProxResult tv_prox(const RandomWalkSpace& space, const StateFunction& f, double tau, const ProxOptions& opts = {});

// Primal value, dual value and their gap for a flux z, with u = f + tau div z.
struct ProxGap {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};
ProxGap prox_gap(const RandomWalkSpace& space, const StateFunction& f, double tau, const StateFunction& u,
                 const FluxField& z);

struct FlowConfig {
  double tau = 1e-2;
  double t_end = 1.0;
  double prox_tolerance = 0.0;  // 0 selects 1e-9 (1 + ||f||)
  int max_inner_iters = 200000;
  int record_stride = 1;
  ProxMethod method = ProxMethod::parametric_cut;
  double extinction_tol = 1e-6;
};

struct StepDiagnostics {
  double t = 0.0;
  double mass = 0.0;
  double tv = 0.0;
  double dist2_mean = 0.0;
  int inner_iters = 0;
  double gap = 0.0;
};

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<StateFunction> snapshots;
  std::vector<StepDiagnostics> steps;  // one per time step, t = 0 included
};

FlowTrajectory evolve(const RandomWalkSpace& space, const StateFunction& u0, const FlowConfig& config);

struct ComparisonReport {
  bool holds = true;
  double worst_excess = 0.0;  // max over q in {1,2,inf} and times of lhs - rhs
};
ComparisonReport comparison_check(const RandomWalkSpace& space, const StateFunction& u0, const StateFunction& v0,
                                  const FlowConfig& config, double slack = -1.0);

enum class PoincareMethod { exact_small, ipm, analytic };

struct PoincareOptions {
  int max_states = 22;
  std::uint64_t seed = 1;
};

struct PoincareReport {
  double p = 1.0;
  double q = 1.0;
  double constant = 0.0;     // exact value, or an upper bound when exact is false
  double lower_bound = 0.0;
  StateFunction minimizer;   // mean zero
  PoincareMethod method = PoincareMethod::exact_small;
  bool exact = true;
};

// lambda^{(q,p)} = inf ||grad u||_q / ||u||_p over nu-mean-zero u, where
// ||grad u||_q^q = (1/2) sum_x nu(x) sum_y K(x,y) |u(y) - u(x)|^q, so q = 1 is TV.
// p = 0 or infinity selects the sup norm.
PoincareReport poincare_constant(const RandomWalkSpace& space, double p, double q, PoincareMethod method,
                                 const PoincareOptions& opts = {});

struct DecayReport {
  bool holds = true;
  double lambda1 = 0.0;
  double worst_ratio = 0.0;  // max of lhs / rhs over recorded t > 0
};
DecayReport decay_bound_check(const RandomWalkSpace& space, const StateFunction& u0, const FlowConfig& config,
                              double slack = 1e-9);

struct ExtinctionReport {
  double t_observed = 0.0;
  bool observed = false;
  double t_upper = 0.0;
  double t_lower = 0.0;
  double lambda2 = 0.0;
  double tau = 0.0;
  bool holds = false;
  FlowTrajectory trajectory;
};

// Config tau <= 0 selects t_upper / 200; t_end <= 0 selects a horizon just past t_upper.
ExtinctionReport extinction_analysis(const RandomWalkSpace& space, const StateFunction& u0, FlowConfig config);

struct MeyerResult {
  double value = 0.0;
  StateSet maximizer;  // the set E with value = <f, chi_E> / P(E)
};

// sup <f, u>_nu over TV(u) <= 1, for nu-mean-zero f.
MeyerResult meyer_norm_detail(const RandomWalkSpace& space, const StateFunction& f);
double meyer_norm(const RandomWalkSpace& space, const StateFunction& f);

}  // namespace tvflow
