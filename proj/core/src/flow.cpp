#include <algorithm>
#include <cmath>
#include <limits>

#include "tvflow/errors.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/maxflow.hpp"

namespace tvflow {

namespace {

double prox_default_tolerance(const RandomWalkSpace& space, const StateFunction& f) {
  return 1e-9 * (1.0 + lp_norm(space, f, 2.0));
}

StateFunction minus_mean(const RandomWalkSpace& space, const StateFunction& u) {
  double m = mean(space, u);
  StateFunction d(u);
  for (auto& v : d) v -= m;
  return d;
}

double positive_part_norm(const RandomWalkSpace& space, const StateFunction& u, const StateFunction& v, double q) {
  StateFunction d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = std::max(0.0, u[i] - v[i]);
  return lp_norm(space, d, q);
}

// Poincare constant with p = 2 or p = 1 against TV, falling back to the
// certified lower bound when the space is too large to enumerate.
double poincare_lower(const RandomWalkSpace& space, double p) {
  PoincareOptions opts;
  if (space.size() <= opts.max_states) return poincare_constant(space, p, 1.0, PoincareMethod::exact_small).constant;
  return poincare_constant(space, p, 1.0, PoincareMethod::ipm).lower_bound;
}

}  // namespace

FlowTrajectory evolve(const RandomWalkSpace& space, const StateFunction& u0, const FlowConfig& config) {
  check_size(space, u0);
  if (!(config.tau > 0.0) || !std::isfinite(config.tau)) throw Error(ErrorKind::invalid_argument, "tau must be positive");
  if (!(config.t_end >= 0.0) || !std::isfinite(config.t_end))
    throw Error(ErrorKind::invalid_argument, "t_end must be finite and nonnegative");
  if (config.record_stride < 1) throw Error(ErrorKind::invalid_argument, "record_stride must be at least 1");
  if (config.prox_tolerance < 0.0) throw Error(ErrorKind::invalid_argument, "prox_tolerance must be positive");

  const double m0 = mean(space, u0);
  auto diagnose = [&](double t, const StateFunction& u, int iters, double gap) {
    StepDiagnostics d;
    d.t = t;
    d.mass = integral(space, u);
    d.tv = total_variation(space, u);
    StateFunction c(u);
    for (auto& v : c) v -= m0;
    d.dist2_mean = lp_norm(space, c, 2.0);
    d.inner_iters = iters;
    d.gap = gap;
    return d;
  };

  FlowTrajectory traj;
  traj.times.push_back(0.0);
  traj.snapshots.push_back(u0);
  traj.steps.push_back(diagnose(0.0, u0, 0, 0.0));

  const long steps = static_cast<long>(std::ceil(config.t_end / config.tau - 1e-9));
  StateFunction u(u0);
  FluxField warm = FluxField::zero(space);
  ProxOptions po;
  po.method = config.method;
  po.max_iters = config.max_inner_iters;
  for (long k = 1; k <= steps; ++k) {
    po.tolerance = config.prox_tolerance > 0.0 ? config.prox_tolerance : prox_default_tolerance(space, u);
    po.warm_start = &warm;
    auto r = tv_prox(space, u, config.tau, po);
    if (!r.converged)
      throw Error(ErrorKind::max_iters_exceeded,
                  "prox did not converge at step " + std::to_string(k) + " (gap " + std::to_string(r.gap) + ")");
    u = std::move(r.u);
    warm = std::move(r.z);
    const double t = static_cast<double>(k) * config.tau;
    traj.steps.push_back(diagnose(t, u, r.iterations, r.gap));
    if (k % config.record_stride == 0 || k == steps) {
      traj.times.push_back(t);
      traj.snapshots.push_back(u);
    }
  }
  return traj;
}

ComparisonReport comparison_check(const RandomWalkSpace& space, const StateFunction& u0, const StateFunction& v0,
                                  const FlowConfig& config, double slack) {
  if (slack < 0.0) {
    double tol = config.prox_tolerance > 0.0
                     ? config.prox_tolerance
                     : std::max(prox_default_tolerance(space, u0), prox_default_tolerance(space, v0));
    slack = 10.0 * tol;
  }
  auto tu = evolve(space, u0, config);
  auto tv = evolve(space, v0, config);
  ComparisonReport rep;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (double q : {1.0, 2.0, 0.0}) {
    const double start = positive_part_norm(space, u0, v0, q);
    for (std::size_t i = 0; i < tu.snapshots.size(); ++i) {
      double excess = positive_part_norm(space, tu.snapshots[i], tv.snapshots[i], q) - start;
      rep.worst_excess = std::max(rep.worst_excess, excess);
      if (excess > slack) rep.holds = false;
    }
  }
  return rep;
}

DecayReport decay_bound_check(const RandomWalkSpace& space, const StateFunction& u0, const FlowConfig& config,
                              double slack) {
  DecayReport rep;
  rep.lambda1 = poincare_lower(space, 1.0);
  const double l2sq = std::pow(lp_norm(space, u0, 2.0), 2);
  const double m0 = mean(space, u0);
  auto traj = evolve(space, u0, config);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t <= 0.0) continue;
    StateFunction d(traj.snapshots[i]);
    for (auto& v : d) v -= m0;
    const double lhs = lp_norm(space, d, 1.0);
    const double rhs = l2sq / (2.0 * rep.lambda1 * t);
    if (lhs > rhs + slack) rep.holds = false;
    if (rhs > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
  }
  return rep;
}

ExtinctionReport extinction_analysis(const RandomWalkSpace& space, const StateFunction& u0, FlowConfig config) {
  check_size(space, u0);
  ExtinctionReport rep;
  const auto centered = minus_mean(space, u0);
  const double dist0 = lp_norm(space, centered, 2.0);
  rep.lambda2 = poincare_lower(space, 2.0);
  rep.t_upper = dist0 / rep.lambda2;
  rep.t_lower = dist0 > 0.0 ? meyer_norm(space, centered) : 0.0;
  if (config.tau <= 0.0) config.tau = rep.t_upper > 0.0 ? rep.t_upper / 200.0 : 1e-2;
  if (config.t_end <= 0.0) config.t_end = rep.t_upper * 1.05 + 2.0 * config.tau;
  rep.tau = config.tau;
  rep.trajectory = evolve(space, u0, config);
  for (const auto& s : rep.trajectory.steps)
    if (s.dist2_mean <= config.extinction_tol) {
      rep.observed = true;
      rep.t_observed = s.t;
      break;
    }
  if (!rep.observed) {
    if (rep.t_upper < config.t_end)
      throw Error(ErrorKind::horizon_too_short, "no extinction observed by t = " + std::to_string(config.t_end) +
                                                    " although the upper bound is " + std::to_string(rep.t_upper));
    return rep;
  }
  const double eps = 1e-12 * (1.0 + rep.t_upper);
  rep.holds = rep.t_lower - config.tau - eps <= rep.t_observed && rep.t_observed <= rep.t_upper + config.tau + eps;
  return rep;
}

MeyerResult meyer_norm_detail(const RandomWalkSpace& space, const StateFunction& f) {
  check_size(space, f);
  const int n = space.size();
  double total = 0.0, scale = 0.0;
  for (int x = 0; x < n; ++x) {
    total += space.nu(x) * f[x];
    scale += space.nu(x) * std::abs(f[x]);
  }
  if (std::abs(total) > 1e-9 * std::max(scale, 1e-300) && std::abs(total) > 1e-300)
    throw Error(ErrorKind::nonzero_mean, "f has nu-integral " + std::to_string(total) + ", the dual norm is infinite");
  MeyerResult res;
  res.maximizer = StateSet(n);
  if (scale == 0.0) return res;

  // Dinkelbach on f(E) / P(E), started from the best singleton.
  double lambda = 0.0;
  StateSet best(n);
  for (int x = 0; x < n; ++x) {
    StateSet e(n);
    e.insert(x);
    double r = space.nu(x) * f[x] / perimeter_value(space, e);
    if (r > lambda) {
      lambda = r;
      best = e;
    }
  }
  for (int it = 0; it < 1000; ++it) {
    // min over E of lambda P(E) - f(E) by a minimum cut.
    MaxFlow mf(n + 2);
    const int s = n, t = n + 1;
    double offset = 0.0;
    for (const auto& e : space.edges()) mf.add_edge(e.a, e.b, lambda * e.w, lambda * e.w);
    for (int x = 0; x < n; ++x) {
      double c = -space.nu(x) * f[x];
      if (c > 0.0) mf.add_edge(x, t, c);
      if (c < 0.0) {
        mf.add_edge(s, x, -c);
        offset += -c;
      }
    }
    double val = mf.solve(s, t) - offset;
    if (!(val < -1e-13 * scale)) break;
    auto side = mf.source_side();
    StateSet e(n);
    for (int x = 0; x < n; ++x)
      if (side[x]) e.insert(x);
    double fe = 0.0;
    for (int x : e.indices()) fe += space.nu(x) * f[x];
    double r = fe / perimeter_value(space, e);
    if (!(r > lambda)) break;
    lambda = r;
    best = e;
  }
  res.value = lambda;
  res.maximizer = best;
  return res;
}

double meyer_norm(const RandomWalkSpace& space, const StateFunction& f) { return meyer_norm_detail(space, f).value; }

}  // namespace tvflow
