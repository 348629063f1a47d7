#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "subsets.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/spectral.hpp"

namespace tvflow {

namespace {

using detail::Mask;

bool sup_norm(double p) { return p <= 0.0 || std::isinf(p); }

// ||chi_E - nu(E)/V||_p for a set of volume v in a space of total mass V.
double centered_indicator_norm(double v, double total, double p) {
  const double a = v / total, rest = total - v;
  if (sup_norm(p)) return std::max(1.0 - a, a);
  if (p == 1.0) return 2.0 * v * rest / total;
  if (p == 2.0) return std::sqrt(v * rest / total);
  return std::pow(v * std::pow(1.0 - a, p) + rest * std::pow(a, p), 1.0 / p);
}

double gradient_norm(const RandomWalkSpace& space, const StateFunction& u, double q) {
  if (q == 1.0) return total_variation(space, u);
  double s = 0.0;
  for (const auto& e : space.edges()) s += e.w * std::pow(std::abs(u[e.b] - u[e.a]), q);
  return std::pow(s, 1.0 / q);
}

struct MinPoincare {
  double total = 1.0;
  double p = 1.0;
  bool has = false;
  double r = 0.0;
  Mask m = 0;

  void visit(Mask mask, double per, double vol) {
    if (mask == 0 || vol >= total * (1.0 - 1e-15)) return;
    double d = centered_indicator_norm(vol, total, p);
    if (!(d > 0.0)) return;
    double q = per / d;
    if (!has || q < r * (1.0 - 1e-12) || (q <= r * (1.0 + 1e-12) && detail::lex_less(mask, m))) {
      has = true;
      r = q;
      m = mask;
    }
  }
  void merge(const MinPoincare& o) {
    if (!o.has) return;
    if (!has || o.r < r * (1.0 - 1e-12) || (o.r <= r * (1.0 + 1e-12) && detail::lex_less(o.m, m))) {
      has = true;
      r = o.r;
      m = o.m;
    }
  }
};

StateFunction centered_indicator(const RandomWalkSpace& space, const StateSet& e) {
  StateFunction u = indicator(e);
  const double a = volume(space, e) / space.total_measure();
  for (auto& v : u) v -= a;
  return u;
}

// Best ratio over the superlevel sets of u, for q = 1.
std::pair<double, StateSet> best_level_set(const RandomWalkSpace& space, const StateFunction& u, double p) {
  const int n = space.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return u[a] > u[b]; });
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  double per = 0.0, vol = 0.0, best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0; k + 1 < n; ++k) {
    int x = order[k];
    double deg = 0.0, inside = 0.0;
    for (const auto& inc : space.incident(x)) {
      double w = space.edges()[inc.edge].w;
      deg += w;
      if (in[inc.other]) inside += w;
    }
    in[x] = 1;
    per += deg - 2.0 * inside;
    vol += space.nu(x);
    double r = per / centered_indicator_norm(vol, space.total_measure(), p);
    if (r < best) {
      best = r;
      best_k = k + 1;
    }
  }
  StateSet e(n);
  for (int k = 0; k < best_k; ++k) e.insert(order[k]);
  return {best, e};
}

std::vector<StateFunction> candidate_vectors(const RandomWalkSpace& space, const SpectralGap& sg, std::uint64_t seed,
                                             int restarts) {
  const int n = space.size();
  std::vector<StateFunction> out{sg.vector};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < restarts; ++r) {
    StateFunction v(static_cast<std::size_t>(n));
    for (auto& x : v) x = gauss(rng);
    // A few lazy-walk smoothing steps pull the start toward slow modes.
    for (int s = 0; s < 20; ++s) {
      StateFunction next(static_cast<std::size_t>(n), 0.0);
      for (int x = 0; x < n; ++x) {
        auto cols = space.row_cols(x);
        auto vals = space.row_vals(x);
        double acc = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) acc += vals[k] * v[cols[k]];
        next[x] = 0.5 * (v[x] + acc);
      }
      v = std::move(next);
    }
    out.push_back(std::move(v));
  }
  return out;
}

void normalize_minimizer(const RandomWalkSpace& space, StateFunction& u, double p) {
  const double m = mean(space, u);
  for (auto& v : u) v -= m;
  const double norm = lp_norm(space, u, p);
  if (norm > 0.0)
    for (auto& v : u) v /= norm;
}

PoincareReport analytic(const RandomWalkSpace& space, double p, double q) {
  if (space.size() != 2)
    throw Error(ErrorKind::method_unavailable, "the analytic method covers two-state spaces only");
  const double n0 = space.nu(0), n1 = space.nu(1);
  StateFunction u{n1, -n0};
  PoincareReport r;
  r.p = p;
  r.q = q;
  r.method = PoincareMethod::analytic;
  r.constant = gradient_norm(space, u, q) / lp_norm(space, u, p);
  r.lower_bound = r.constant;
  normalize_minimizer(space, u, p);
  r.minimizer = std::move(u);
  return r;
}

PoincareReport approximate(const RandomWalkSpace& space, double p, double q, const PoincareOptions& opts) {
  const auto sg = spectral_gap(space);
  const double total = space.total_measure();
  double nu_min = std::numeric_limits<double>::infinity();
  for (double v : space.nu()) nu_min = std::min(nu_min, v);
  const double ip = sup_norm(p) ? 0.0 : 1.0 / p;

  PoincareReport r;
  r.p = p;
  r.q = q;
  r.method = PoincareMethod::ipm;
  r.exact = false;
  r.constant = std::numeric_limits<double>::infinity();
  auto cands = candidate_vectors(space, sg, opts.seed, 8);
  if (q == 1.0) {
    for (const auto& c : cands) {
      auto [val, set] = best_level_set(space, c, p);
      if (val < r.constant) {
        r.constant = val;
        r.minimizer = centered_indicator(space, set);
      }
    }
    const double h_low = 0.5 * sg.gap;  // h >= gap / 2
    double lb = 0.5 * h_low * std::pow(nu_min, 1.0 - ip);
    const double l12 = h_low * std::sqrt(nu_min);
    lb = std::max(lb, l12 * (ip >= 0.5 ? std::pow(total, 0.5 - ip) : std::pow(nu_min, 0.5 - ip)));
    r.lower_bound = lb;
  } else if (q == 2.0) {
    for (auto c : cands) {
      const double m = mean(space, c);
      for (auto& v : c) v -= m;
      const double norm = lp_norm(space, c, p);
      if (!(norm > 0.0)) continue;
      double val = gradient_norm(space, c, 2.0) / norm;
      if (val < r.constant) {
        r.constant = val;
        r.minimizer = c;
      }
    }
    const double l22 = std::sqrt(sg.gap);
    r.lower_bound = l22 * (ip >= 0.5 ? std::pow(total, 0.5 - ip) : std::pow(nu_min, 0.5 - ip));
    if (p == 2.0 && sg.exact) {
      r.constant = r.lower_bound = l22;
      r.minimizer = sg.vector;
      r.exact = true;
    }
  } else {
    throw Error(ErrorKind::method_unavailable, "only q = 1 and q = 2 are supported");
  }
  if (!r.minimizer.empty()) normalize_minimizer(space, r.minimizer, p);
  return r;
}

}  // namespace

PoincareReport poincare_constant(const RandomWalkSpace& space, double p, double q, PoincareMethod method,
                                 const PoincareOptions& opts) {
  if (!sup_norm(p) && p < 1.0) throw Error(ErrorKind::invalid_argument, "p must be at least 1");
  if (!(q >= 1.0) || std::isinf(q)) throw Error(ErrorKind::invalid_argument, "q must be finite and at least 1");
  if (space.size() < 2) throw Error(ErrorKind::invalid_argument, "a Poincare constant needs at least two states");
  if (method == PoincareMethod::analytic) return analytic(space, p, q);
  if (method == PoincareMethod::ipm) return approximate(space, p, q, opts);

  if (space.size() > opts.max_states)
    throw Error(ErrorKind::too_large,
                std::to_string(space.size()) + " states exceed the enumeration limit " + std::to_string(opts.max_states));
  if (q == 2.0) return approximate(space, p, q, opts);
  if (q != 1.0) throw Error(ErrorKind::method_unavailable, "exact enumeration covers q = 1 only");

  std::vector<int> all(static_cast<std::size_t>(space.size()));
  std::iota(all.begin(), all.end(), 0);
  detail::MemberGraph g(space, all);
  MinPoincare init;
  init.total = space.total_measure();
  init.p = p;
  auto best = detail::scan_subsets(g, init);
  auto set = g.to_set(space.size(), best.m);
  PoincareReport r;
  r.p = p;
  r.q = q;
  r.method = PoincareMethod::exact_small;
  r.constant = perimeter_value(space, set) / centered_indicator_norm(volume(space, set), init.total, p);
  r.lower_bound = r.constant;
  r.minimizer = centered_indicator(space, set);
  normalize_minimizer(space, r.minimizer, p);
  return r;
}

}  // namespace tvflow
