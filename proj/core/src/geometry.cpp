#include "tvflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tvflow/errors.hpp"

namespace tvflow {

double volume(const RandomWalkSpace& space, const StateSet& e) {
  check_size(space, e);
  double v = 0.0;
  for (int x = 0; x < space.size(); ++x)
    if (e.contains(x)) v += space.nu(x);
  return v;
}

double interaction(const RandomWalkSpace& space, const StateSet& a, const StateSet& b) {
  check_size(space, a);
  check_size(space, b);
  double total = 0.0;
  for (int x = 0; x < space.size(); ++x) {
    if (!a.contains(x)) continue;
    auto cols = space.row_cols(x);
    auto vals = space.row_vals(x);
    double s = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (b.contains(cols[k])) s += vals[k];
    total += space.nu(x) * s;
  }
  return total;
}

double perimeter_value(const RandomWalkSpace& space, const StateSet& e) {
  check_size(space, e);
  double p = 0.0;
  for (const auto& ed : space.edges())
    if (e.contains(ed.a) != e.contains(ed.b)) p += ed.w;
  return p;
}

PerimeterReport perimeter(const RandomWalkSpace& space, const StateSet& e) {
  PerimeterReport r;
  r.perimeter = interaction(space, e, e.complement());
  r.volume = volume(space, e);
  r.self_interaction = interaction(space, e, e);
  r.ratio_defined = r.volume > 0.0;
  r.ratio = r.ratio_defined ? r.perimeter / r.volume : std::numeric_limits<double>::quiet_NaN();
  return r;
}

double ratio(const RandomWalkSpace& space, const StateSet& e) {
  double v = volume(space, e);
  if (!(v > 0.0)) throw Error(ErrorKind::empty_set, "ratio of a null set is undefined");
  return perimeter_value(space, e) / v;
}

double localized_perimeter(const RandomWalkSpace& space, const StateSet& e, const StateSet& window) {
  check_size(space, e);
  check_size(space, window);
  StateSet in(space.size()), out(space.size()), rest(space.size()), win_rest(space.size());
  for (int x = 0; x < space.size(); ++x) {
    if (e.contains(x) && window.contains(x)) in.insert(x);
    if (e.contains(x) && !window.contains(x)) out.insert(x);
    if (!e.contains(x)) rest.insert(x);
    if (window.contains(x) && !e.contains(x)) win_rest.insert(x);
  }
  return interaction(space, in, rest) + interaction(space, out, win_rest);
}

double union_perimeter_identity_check(const RandomWalkSpace& space, const StateSet& a, const StateSet& b) {
  check_size(space, a);
  check_size(space, b);
  StateSet u(space.size());
  for (int x = 0; x < space.size(); ++x) {
    if (a.contains(x) && b.contains(x)) throw Error(ErrorKind::overlapping_sets, "sets share state " + space.id(x));
    if (a.contains(x) || b.contains(x)) u.insert(x);
  }
  double lhs = perimeter(space, u).perimeter;
  double rhs = perimeter(space, a).perimeter + perimeter(space, b).perimeter - 2.0 * interaction(space, a, b);
  return std::abs(lhs - rhs);
}

double total_variation(const RandomWalkSpace& space, const StateFunction& u) {
  check_size(space, u);
  double tv = 0.0;
  for (const auto& e : space.edges()) tv += e.w * std::abs(u[e.b] - u[e.a]);
  return tv;
}

double dirichlet_energy(const RandomWalkSpace& space, const StateFunction& u) {
  check_size(space, u);
  double h = 0.0;
  for (const auto& e : space.edges()) {
    double d = u[e.b] - u[e.a];
    h += e.w * d * d;
  }
  return h;
}

StateFunction mean_curvature(const RandomWalkSpace& space, const StateSet& e) {
  check_size(space, e);
  StateFunction h(static_cast<std::size_t>(space.size()));
  for (int x = 0; x < space.size(); ++x) {
    auto cols = space.row_cols(x);
    auto vals = space.row_vals(x);
    double m = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (e.contains(cols[k])) m += vals[k];
    h[x] = 1.0 - 2.0 * m;
  }
  return h;
}

CoareaResult coarea_check(const RandomWalkSpace& space, const StateFunction& u) {
  check_size(space, u);
  const int n = space.size();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return u[a] > u[b]; });
  // Sweep thresholds downwards; after adding every state of value t_{i+1},
  // the superlevel set {u > t_i} is complete and its perimeter is known.
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  double per = 0.0;
  double rhs = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    double level = u[order[k]];
    while (k < order.size() && u[order[k]] == level) {
      int x = order[k++];
      for (const auto& inc : space.incident(x)) {
        double w = space.edges()[inc.edge].w;
        per += in[inc.other] ? -w : w;
      }
      in[x] = 1;
    }
    if (k < order.size()) rhs += (level - u[order[k]]) * per;
  }
  CoareaResult r;
  r.lhs = total_variation(space, u);
  r.rhs = rhs;
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

PiecewiseLinear::PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw Error(ErrorKind::invalid_argument, "piecewise-linear map needs knots");
  std::sort(knots_.begin(), knots_.end());
  bool up = true, down = true;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    double dt = knots_[i].first - knots_[i - 1].first;
    double dv = knots_[i].second - knots_[i - 1].second;
    if (dt <= 0.0) throw Error(ErrorKind::invalid_argument, "knots must have distinct abscissae");
    lip_ = std::max(lip_, std::abs(dv) / dt);
    up = up && dv >= 0.0;
    down = down && dv <= 0.0;
  }
  if (!up && !down) throw Error(ErrorKind::invalid_argument, "map must be monotone");
}

double PiecewiseLinear::operator()(double t) const {
  if (t <= knots_.front().first) return knots_.front().second;
  if (t >= knots_.back().first) return knots_.back().second;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), std::pair{t, std::numeric_limits<double>::infinity()});
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

bool lipschitz_contraction_check(const RandomWalkSpace& space, const StateFunction& u,
                                 const PiecewiseLinear& phi, double slack) {
  StateFunction v(u.size());
  std::transform(u.begin(), u.end(), v.begin(), [&](double t) { return phi(t); });
  double tv = total_variation(space, u);
  return total_variation(space, v) <= phi.lipschitz() * tv + slack * std::max(1.0, tv);
}

double integral(const RandomWalkSpace& space, const StateFunction& u) {
  check_size(space, u);
  double s = 0.0;
  for (int x = 0; x < space.size(); ++x) s += space.nu(x) * u[x];
  return s;
}

double mean(const RandomWalkSpace& space, const StateFunction& u) {
  return integral(space, u) / space.total_measure();
}

double lp_norm(const RandomWalkSpace& space, const StateFunction& u, double p) {
  check_size(space, u);
  if (!(p > 0.0) || std::isinf(p)) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  if (p == 1.0) {
    for (int x = 0; x < space.size(); ++x) s += space.nu(x) * std::abs(u[x]);
    return s;
  }
  if (p == 2.0) {
    for (int x = 0; x < space.size(); ++x) s += space.nu(x) * u[x] * u[x];
    return std::sqrt(s);
  }
  for (int x = 0; x < space.size(); ++x) s += space.nu(x) * std::pow(std::abs(u[x]), p);
  return std::pow(s, 1.0 / p);
}

StateFunction indicator(const StateSet& e) {
  StateFunction u(static_cast<std::size_t>(e.universe()), 0.0);
  for (int x = 0; x < e.universe(); ++x)
    if (e.contains(x)) u[x] = 1.0;
  return u;
}

}  // namespace tvflow
