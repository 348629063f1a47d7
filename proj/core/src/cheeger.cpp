#include "tvflow/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "subsets.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/maxflow.hpp"
#include "tvflow/spectral.hpp"

namespace tvflow {

using detail::Mask;

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

struct MinRatio {
  double tol = 1e-12;
  double vmax = std::numeric_limits<double>::infinity();
  bool has = false;
  double r = 0.0;
  double v = 0.0;
  Mask m = 0;

  bool better(double r2, double v2, Mask m2) const {
    if (!has) return true;
    if (!close(r2, r, tol)) return r2 < r;
    if (!close(v2, v, tol)) return v2 < v;
    return detail::lex_less(m2, m);
  }
  void visit(Mask mask, double p, double vol) {
    if (mask == 0 || vol > vmax) return;
    double q = p / vol;
    if (better(q, vol, mask)) {
      has = true;
      r = q;
      v = vol;
      m = mask;
    }
  }
  void merge(const MinRatio& o) {
    if (o.has && better(o.r, o.v, o.m)) {
      has = true;
      r = o.r;
      v = o.v;
      m = o.m;
    }
  }
};

// min over E inside omega of P(E) - lambda nu(E); returns the value and the
// inclusion-minimal minimizer.
std::pair<double, StateSet> parametric_cut(const RandomWalkSpace& space, const std::vector<int>& members,
                                           double lambda) {
  const int n = space.size();
  const int k = static_cast<int>(members.size());
  std::vector<int> local(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < k; ++i) local[members[i]] = i;
  MaxFlow mf(k + 2);
  const int s = k, t = k + 1;
  double offset = 0.0;
  for (int i = 0; i < k; ++i) {
    int x = members[i];
    double outside = 0.0;
    for (const auto& inc : space.incident(x)) {
      double w = space.edges()[inc.edge].w;
      if (local[inc.other] < 0)
        outside += w;
      else if (inc.other > x)
        mf.add_edge(i, local[inc.other], w, w);
    }
    double c = outside - lambda * space.nu(x);
    if (c > 0.0)
      mf.add_edge(i, t, c);
    else if (c < 0.0) {
      mf.add_edge(s, i, -c);
      offset += -c;
    }
  }
  double cut = mf.solve(s, t);
  auto side = mf.source_side();
  StateSet e(n);
  for (int i = 0; i < k; ++i)
    if (side[i]) e.insert(members[i]);
  return {cut - offset, e};
}

void require_members(const RandomWalkSpace& space, const StateSet& omega) {
  check_size(space, omega);
  if (omega.empty()) throw Error(ErrorKind::empty_set, "omega is empty");
}

// Best superlevel-set rounding of u for the balanced ratio.
std::pair<double, StateSet> best_threshold(const RandomWalkSpace& space, const StateFunction& u) {
  const int n = space.size();
  const double half = 0.5 * space.total_measure() * (1.0 + 1e-12);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return u[a] > u[b]; });
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  double per = 0.0, vol = 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  bool best_top = true;
  for (std::size_t k = 0; k < order.size();) {
    double level = u[order[k]];
    while (k < order.size() && u[order[k]] == level) {
      int x = order[k++];
      for (const auto& inc : space.incident(x)) {
        double w = space.edges()[inc.edge].w;
        per += in[inc.other] ? -w : w;
      }
      in[x] = 1;
      vol += space.nu(x);
    }
    if (k == order.size()) break;
    double rest = space.total_measure() - vol;
    bool top = vol <= half;
    double r = per / (top ? vol : rest);
    if ((top || rest <= half) && r < best) {
      best = r;
      best_k = k;
      best_top = top;
    }
  }
  StateSet d(n);
  if (std::isinf(best)) return {best, d};
  for (std::size_t j = 0; j < order.size(); ++j)
    if ((j < best_k) == best_top) d.insert(order[j]);
  return {perimeter_value(space, d) / volume(space, d), d};
}

StateFunction mean_zero_sign(const RandomWalkSpace& space, const StateFunction& u, double med) {
  StateFunction s(u.size(), 0.0);
  double pos = 0.0, neg = 0.0, zero = 0.0;
  for (int x = 0; x < space.size(); ++x) {
    if (u[x] > med) {
      s[x] = 1.0;
      pos += space.nu(x);
    } else if (u[x] < med) {
      s[x] = -1.0;
      neg += space.nu(x);
    } else {
      zero += space.nu(x);
    }
  }
  if (zero > 0.0) {
    double c = std::clamp((neg - pos) / zero, -1.0, 1.0);
    for (int x = 0; x < space.size(); ++x)
      if (u[x] == med) s[x] = c;
  }
  return s;
}

CheegerReport ipm_global(const RandomWalkSpace& space, const IpmOptions& ipm) {
  const int n = space.size();
  CheegerReport best;
  best.mode = CheegerMode::global_balanced;
  best.exact = false;
  best.value = std::numeric_limits<double>::infinity();
  best.witness = StateSet(n);
  std::mt19937_64 rng(ipm.seed);
  std::normal_distribution<double> gauss;
  auto consider = [&](const StateFunction& u) {
    auto [r, d] = best_threshold(space, u);
    if (r < best.value - 1e-15) {
      best.value = r;
      best.witness = d;
    }
  };
  auto fiedler = spectral_gap(space);
  for (int restart = 0; restart < std::max(1, ipm.restarts); ++restart) {
    StateFunction u(static_cast<std::size_t>(n));
    if (restart == 0)
      u = fiedler.vector;
    else
      for (auto& v : u) v = gauss(rng);
    double m = mean(space, u);
    for (auto& v : u) v -= m;
    consider(u);
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < ipm.max_iters; ++it) {
      auto med = median_set(space, u);
      double c = 0.5 * (med.lo + med.hi);
      StateFunction d(u);
      for (auto& v : d) v -= c;
      double l1 = lp_norm(space, d, 1.0);
      if (!(l1 > 0.0)) break;
      double ratio_u = total_variation(space, u) / l1;
      if (!(ratio_u > 0.0) || ratio_u >= last - 1e-13) break;
      last = ratio_u;
      // Inner step: argmin TV(v) - ratio <s, v> + (eps/2) ||v||^2 with eps = ratio / 10.
      StateFunction s = mean_zero_sign(space, u, c);
      StateFunction f(s.size());
      for (std::size_t x = 0; x < s.size(); ++x) f[x] = 10.0 * s[x];
      auto prox = tv_prox(space, f, 10.0 / ratio_u);
      StateFunction v = prox.u;
      double mv = mean(space, v);
      for (auto& t : v) t -= mv;
      double nv = lp_norm(space, v, 2.0);
      if (!(nv > 0.0)) break;
      for (auto& t : v) t /= nv;
      u = v;
      consider(u);
      ++best.iterations;
    }
  }
  return best;
}

}  // namespace

CheegerReport cheeger_subset_exact(const RandomWalkSpace& space, const StateSet& omega, const CheegerOptions& opts) {
  require_members(space, omega);
  auto members = omega.indices();
  if (static_cast<int>(members.size()) > opts.exhaustive_limit)
    throw Error(ErrorKind::too_large, std::to_string(members.size()) +
                                          " states exceed the exhaustive limit; use cheeger_subset_dinkelbach");
  detail::MemberGraph g(space, members);
  MinRatio init;
  init.tol = opts.tie_tolerance;
  auto best = detail::scan_subsets(g, init);
  CheegerReport r;
  r.witness = g.to_set(space.size(), best.m);
  r.value = perimeter_value(space, r.witness) / volume(space, r.witness);
  r.mode = CheegerMode::subset_of_omega;
  r.exact = true;
  return r;
}

CheegerReport cheeger_subset_dinkelbach(const RandomWalkSpace& space, const StateSet& omega) {
  require_members(space, omega);
  auto members = omega.indices();
  CheegerReport r;
  r.mode = CheegerMode::subset_of_omega;
  r.exact = true;
  r.witness = omega;
  r.value = perimeter_value(space, omega) / volume(space, omega);
  for (int it = 0; it < 10000; ++it) {
    ++r.iterations;
    auto [val, e] = parametric_cut(space, members, r.value);
    double scale = std::max(1.0, r.value * volume(space, omega));
    if (!(val < -1e-13 * scale) || e.empty()) break;
    double q = perimeter_value(space, e) / volume(space, e);
    if (!(q < r.value)) break;
    r.value = q;
    r.witness = e;
  }
  return r;
}

CheegerReport cheeger_global(const RandomWalkSpace& space, GlobalMethod method, const CheegerOptions& opts,
                             const IpmOptions& ipm) {
  if (space.size() < 2) throw Error(ErrorKind::invalid_argument, "a single-state space has no balanced cut");
  if (method == GlobalMethod::ipm) return ipm_global(space, ipm);
  if (space.size() > opts.exhaustive_limit)
    throw Error(ErrorKind::too_large, std::to_string(space.size()) + " states exceed the exhaustive limit");
  std::vector<int> all(static_cast<std::size_t>(space.size()));
  std::iota(all.begin(), all.end(), 0);
  detail::MemberGraph g(space, all);
  MinRatio init;
  init.tol = opts.tie_tolerance;
  init.vmax = 0.5 * space.total_measure() * (1.0 + 1e-12);
  auto best = detail::scan_subsets(g, init);
  CheegerReport r;
  r.witness = g.to_set(space.size(), best.m);
  r.value = perimeter_value(space, r.witness) / volume(space, r.witness);
  r.mode = CheegerMode::global_balanced;
  r.exact = true;
  return r;
}

CalibrabilityResult is_calibrable(const RandomWalkSpace& space, const StateSet& omega, CalibrabilityMethod method,
                                  double tolerance, const CheegerOptions& opts) {
  require_members(space, omega);
  CalibrabilityResult out;
  out.lambda = perimeter_value(space, omega) / volume(space, omega);

  if (method != CalibrabilityMethod::lp) {
    auto rep = method == CalibrabilityMethod::exhaustive ? cheeger_subset_exact(space, omega, opts)
                                                         : cheeger_subset_dinkelbach(space, omega);
    out.calibrable = !(rep.value < out.lambda - 1e-12 * std::max(1.0, out.lambda));
    if (!out.calibrable) {
      out.witness = rep.witness;
      out.witness_ratio = rep.value;
    }
    return out;
  }

  auto members = omega.indices();
  const int k = static_cast<int>(members.size());
  std::vector<int> local(static_cast<std::size_t>(space.size()), -1);
  for (int i = 0; i < k; ++i) local[members[i]] = i;
  std::vector<double> b(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    int x = members[i];
    double m = 0.0;
    auto cols = space.row_cols(x);
    auto vals = space.row_vals(x);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (omega.contains(cols[j])) m += vals[j];
    b[i] = space.nu(x) * (1.0 - m - out.lambda);
  }
  MaxFlow mf(k + 2);
  const int s = k, t = k + 1;
  std::vector<int> handle(space.edges().size(), -1);
  for (std::size_t e = 0; e < space.edges().size(); ++e) {
    const auto& ed = space.edges()[e];
    if (local[ed.a] >= 0 && local[ed.b] >= 0) handle[e] = mf.add_edge(local[ed.a], local[ed.b], ed.w, ed.w);
  }
  for (int i = 0; i < k; ++i) {
    if (b[i] > 0.0) mf.add_edge(s, i, b[i]);
    if (b[i] < 0.0) mf.add_edge(i, t, -b[i]);
  }
  mf.solve(s, t);

  FluxField g = FluxField::zero(space);
  std::vector<double> net(static_cast<std::size_t>(k), 0.0);
  for (std::size_t e = 0; e < space.edges().size(); ++e) {
    if (handle[e] < 0) continue;
    const auto& ed = space.edges()[e];
    double f = mf.flow(handle[e]);
    g.g[e] = std::clamp(f / ed.w, -1.0, 1.0);
    net[local[ed.a]] += ed.w * g.g[e];
    net[local[ed.b]] -= ed.w * g.g[e];
  }
  double worst = 0.0;
  for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(net[i] - b[i]) / space.nu(members[i]));
  out.residual = worst;
  out.calibrable = worst <= tolerance;
  out.flux = g;
  if (!out.calibrable) {
    auto side = mf.source_side();
    StateSet r(space.size()), rest(space.size());
    for (int i = 0; i < k; ++i) (side[i] ? r : rest).insert(members[i]);
    std::optional<StateSet> pick;
    double best = out.lambda;
    for (const auto* c : {&r, &rest}) {
      if (c->empty()) continue;
      double q = perimeter_value(space, *c) / volume(space, *c);
      if (q < best) {
        best = q;
        pick = *c;
      }
    }
    if (!pick) {
      auto rep = cheeger_subset_dinkelbach(space, omega);
      pick = rep.witness;
      best = rep.value;
    }
    out.witness = pick;
    out.witness_ratio = best;
  }
  return out;
}

bool curvature_necessary_check(const RandomWalkSpace& space, const StateSet& omega, double tolerance) {
  require_members(space, omega);
  double lambda = perimeter_value(space, omega) / volume(space, omega);
  auto h = mean_curvature(space, omega);
  for (int x : omega.indices())
    if (h[x] > lambda + tolerance) return false;
  return true;
}

MedianInterval median_set(const RandomWalkSpace& space, const StateFunction& u) {
  check_size(space, u);
  const int n = space.size();
  const double half = 0.5 * space.total_measure() * (1.0 + 1e-12);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return u[a] < u[b]; });
  MedianInterval m;
  // lo: smallest value t with nu(u > t) <= half.
  double above = space.total_measure();
  for (std::size_t k = 0; k < order.size();) {
    double level = u[order[k]];
    while (k < order.size() && u[order[k]] == level) above -= space.nu(order[k++]);
    if (above <= half) {
      m.lo = level;
      break;
    }
  }
  // hi: largest value t with nu(u < t) <= half.
  double below = space.total_measure();
  for (std::size_t k = order.size(); k > 0;) {
    double level = u[order[k - 1]];
    while (k > 0 && u[order[k - 1]] == level) below -= space.nu(order[--k]);
    if (below <= half) {
      m.hi = level;
      break;
    }
  }
  return m;
}

bool zero_median(const RandomWalkSpace& space, const StateFunction& u, double tolerance) {
  check_size(space, u);
  double scale = 0.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  double pos = 0.0, neg = 0.0;
  for (int x = 0; x < space.size(); ++x) {
    if (u[x] > tolerance * scale) pos += space.nu(x);
    if (u[x] < -tolerance * scale) neg += space.nu(x);
  }
  const double half = 0.5 * space.total_measure() * (1.0 + 1e-12);
  return pos <= half && neg <= half;
}

std::vector<StateSet> decompose_m(const RandomWalkSpace& space, const StateSet& omega) {
  return support_components(space, omega);
}

}  // namespace tvflow
