#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>

#include "subsets.hpp"
#include "tvflow/cheeger.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/maxflow.hpp"
#include "tvflow/parallel.hpp"

namespace tvflow {

StateFunction divergence(const RandomWalkSpace& space, const FluxField& z) {
  StateFunction d(static_cast<std::size_t>(space.size()), 0.0);
  for (std::size_t k = 0; k < space.edges().size(); ++k) {
    const auto& e = space.edges()[k];
    d[e.a] += e.w * z.g[k];
    d[e.b] -= e.w * z.g[k];
  }
  for (int x = 0; x < space.size(); ++x) d[x] /= space.nu(x);
  return d;
}

double max_abs(const FluxField& z) {
  double m = 0.0;
  for (double v : z.g) m = std::max(m, std::abs(v));
  return m;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

EigenpairResult verify_eigenpair(const RandomWalkSpace& space, double lambda, const StateFunction& u_in,
                                 double tolerance) {
  check_size(space, u_in);
  const int n = space.size();
  EigenpairResult res;
  res.violated = StateSet(n);
  double l1 = lp_norm(space, u_in, 1.0);
  if (!(l1 > 0.0) || !std::isfinite(l1))
    throw Error(ErrorKind::normalization_failure, "u has zero or non-finite L1 norm");
  res.scale = l1;
  StateFunction u(u_in);
  for (auto& v : u) v /= l1;
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  const double eq_tol = 1e-12 * umax;
  auto is_zero = [&](double v) { return std::abs(v) <= eq_tol; };

  auto& cert = res.certificate;
  cert.lambda = lambda;
  cert.u = u;
  cert.xi.assign(static_cast<std::size_t>(n), 0.0);
  cert.g = FluxField::zero(space);

  if (lambda < -tolerance || lambda > 1.0 + tolerance) {
    res.failure = "lambda outside [0, 1]";
    return res;
  }
  if (lambda > 0.0 && !zero_median(space, u)) {
    res.failure = "zero is not a median of u";
    return res;
  }

  // Fixed part of each balance equation (scaled by nu): signs on pairs with
  // distinct values and on states where u is nonzero.
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  for (int x = 0; x < n; ++x)
    if (!is_zero(u[x])) {
      cert.xi[x] = sign_of(u[x]);
      c[x] += lambda * space.nu(x) * cert.xi[x];
    }
  MaxFlow mf(n + 3);
  const int z = n, s = n + 1, t = n + 2;
  std::vector<int> handle(space.edges().size(), -1);
  for (std::size_t k = 0; k < space.edges().size(); ++k) {
    const auto& e = space.edges()[k];
    double d = u[e.b] - u[e.a];
    if (std::abs(d) > eq_tol) {
      cert.g.g[k] = sign_of(d);
      c[e.a] += e.w * cert.g.g[k];
      c[e.b] -= e.w * cert.g.g[k];
    } else {
      handle[k] = mf.add_edge(e.a, e.b, e.w, e.w);
    }
  }
  std::vector<int> xi_handle(static_cast<std::size_t>(n), -1);
  for (int x = 0; x < n; ++x)
    if (is_zero(u[x]) && lambda > 0.0) xi_handle[x] = mf.add_edge(x, z, lambda * space.nu(x), lambda * space.nu(x));
  // Free outflow required at x is -c[x]; the xi hub absorbs the rest.
  double hub = 0.0;
  double supply = 0.0;
  for (int x = 0; x < n; ++x) {
    double r = -c[x];
    hub -= r;
    if (r > 0.0) {
      mf.add_edge(s, x, r);
      supply += r;
    } else if (r < 0.0) {
      mf.add_edge(x, t, -r);
    }
  }
  if (hub > 0.0) {
    mf.add_edge(s, z, hub);
    supply += hub;
  } else if (hub < 0.0) {
    mf.add_edge(z, t, -hub);
  }
  double sent = mf.solve(s, t);
  res.deficit = std::max(0.0, supply - sent);

  for (std::size_t k = 0; k < space.edges().size(); ++k)
    if (handle[k] >= 0) cert.g.g[k] = std::clamp(mf.flow(handle[k]) / space.edges()[k].w, -1.0, 1.0);
  for (int x = 0; x < n; ++x)
    if (xi_handle[x] >= 0) cert.xi[x] = std::clamp(mf.flow(xi_handle[x]) / (lambda * space.nu(x)), -1.0, 1.0);

  auto div = divergence(space, cert.g);
  auto& r = cert.residuals;
  for (int x = 0; x < n; ++x) r.equation = std::max(r.equation, std::abs(div[x] + lambda * cert.xi[x]));
  for (std::size_t k = 0; k < space.edges().size(); ++k) {
    const auto& e = space.edges()[k];
    double d = u[e.b] - u[e.a];
    r.sign = std::max(r.sign, std::abs(cert.g.g[k] * d - std::abs(d)));
  }
  double xi_max = 0.0;
  for (double v : cert.xi) xi_max = std::max(xi_max, std::abs(v));
  r.bound = std::max({0.0, max_abs(cert.g) - 1.0, xi_max - 1.0});
  r.lambda_tv = std::abs(total_variation(space, u) - lambda);

  res.certified = r.equation <= tolerance && r.sign <= tolerance && r.bound <= tolerance && r.lambda_tv <= tolerance;
  if (!res.certified) {
    auto side = mf.source_side();
    for (int x = 0; x < n; ++x)
      if (side[x]) res.violated.insert(x);
    res.failure = r.lambda_tv > tolerance && r.equation <= tolerance
                      ? "TV(u) differs from lambda"
                      : "flux balance infeasible on the reported state set";
  }
  return res;
}

namespace {

bool candidate_order(const SetEigenpair& a, const SetEigenpair& b) {
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  auto ia = a.set.indices(), ib = b.set.indices();
  if (ia.size() != ib.size()) return ia.size() < ib.size();
  return ia < ib;
}

std::optional<SetEigenpair> certify_set(const RandomWalkSpace& space, const StateSet& omega, double tolerance) {
  const double vol = volume(space, omega);
  if (!(vol > 0.0) || vol > 0.5 * space.total_measure() * (1.0 + 1e-12)) return std::nullopt;
  if (decompose_m(space, omega).size() != 1) return std::nullopt;
  if (!curvature_necessary_check(space, omega, tolerance)) return std::nullopt;
  auto cal = is_calibrable(space, omega, CalibrabilityMethod::lp, tolerance);
  if (!cal.calibrable) return std::nullopt;
  StateFunction u = indicator(omega);
  for (auto& v : u) v /= vol;
  auto res = verify_eigenpair(space, cal.lambda, u, tolerance);
  if (!res.certified) return std::nullopt;
  return SetEigenpair{cal.lambda, omega, res.certificate};
}

}  // namespace

std::vector<SetEigenpair> set_eigenpair_search(const RandomWalkSpace& space, const SearchOptions& opts) {
  const int n = space.size();
  std::vector<SetEigenpair> found;

  StateFunction constant(static_cast<std::size_t>(n), 1.0 / space.total_measure());
  auto trivial = verify_eigenpair(space, 0.0, constant, opts.tolerance);
  if (trivial.certified) found.push_back({0.0, StateSet::full(n), trivial.certificate});

  if (opts.candidates) {
    for (const auto& c : *opts.candidates) {
      check_size(space, c);
      if (c.count() == n) continue;
      if (auto hit = certify_set(space, c, opts.tolerance)) found.push_back(std::move(*hit));
    }
  } else {
    if (n > opts.exhaustive_limit)
      throw Error(ErrorKind::too_large, std::to_string(n) + " states exceed the exhaustive limit; pass candidates");
    std::vector<detail::Mask> adj(static_cast<std::size_t>(n), 0);
    for (const auto& e : space.edges()) {
      adj[e.a] |= detail::Mask{1} << e.b;
      adj[e.b] |= detail::Mask{1} << e.a;
    }
    const double half = 0.5 * space.total_measure() * (1.0 + 1e-12);
    const detail::Mask full = n == 32 ? ~detail::Mask{0} : (detail::Mask{1} << n) - 1;
    const int low = std::min(n, 12);
    const int chunks = 1 << (n - low);
    std::vector<std::vector<SetEigenpair>> parts(static_cast<std::size_t>(chunks));
    parallel_for(chunks, [&](int c) {
      for (detail::Mask lo = 0; lo < (detail::Mask{1} << low); ++lo) {
        detail::Mask m = (static_cast<detail::Mask>(c) << low) | lo;
        if (m == 0 || m == full) continue;
        double vol = 0.0;
        for (detail::Mask b = m; b; b &= b - 1) vol += space.nu(std::countr_zero(b));
        if (vol > half) continue;
        detail::Mask reach = m & (~m + 1);
        for (;;) {
          detail::Mask grow = reach;
          for (detail::Mask b = reach; b; b &= b - 1) grow |= adj[std::countr_zero(b)];
          grow &= m;
          if (grow == reach) break;
          reach = grow;
        }
        if (reach != m) continue;
        StateSet omega(n);
        for (detail::Mask b = m; b; b &= b - 1) omega.insert(std::countr_zero(b));
        if (auto hit = certify_set(space, omega, opts.tolerance)) parts[c].push_back(std::move(*hit));
      }
    });
    for (auto& p : parts)
      for (auto& h : p) found.push_back(std::move(h));
  }
  std::stable_sort(found.begin(), found.end(), candidate_order);
  return found;
}

BalancedPairResult balanced_pair_eigencheck(const RandomWalkSpace& space, const StateSet& omega, double tolerance) {
  check_size(space, omega);
  const double total = space.total_measure();
  const double vol = volume(space, omega);
  if (std::abs(vol - 0.5 * total) > std::max(tolerance, 1e-12) * total)
    throw Error(ErrorKind::not_balanced, "nu(omega) = " + std::to_string(vol) + " but nu(X)/2 = " +
                                             std::to_string(0.5 * total));
  BalancedPairResult out;
  auto rest = omega.complement();
  out.omega_calibrable = is_calibrable(space, omega, CalibrabilityMethod::lp, tolerance).calibrable;
  out.complement_calibrable = is_calibrable(space, rest, CalibrabilityMethod::lp, tolerance).calibrable;
  out.lambda = 2.0 * perimeter_value(space, omega) / total;
  bool all = out.omega_calibrable && out.complement_calibrable;
  for (double t : {0.0, 1.0, 2.0}) {
    StateFunction u(static_cast<std::size_t>(space.size()));
    for (int x = 0; x < space.size(); ++x) u[x] = omega.contains(x) ? t : -(2.0 - t);
    auto res = verify_eigenpair(space, out.lambda, u, tolerance);
    all = all && res.certified;
    out.family.push_back(std::move(res));
  }
  out.certified = all;
  return out;
}

}  // namespace tvflow
