#include <algorithm>
#include <cmath>
#include <numeric>

#include "tvflow/errors.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/maxflow.hpp"

namespace tvflow {

ProxGap prox_gap(const RandomWalkSpace& space, const StateFunction& f, double tau, const StateFunction& u,
                 const FluxField& z) {
  auto div = divergence(space, z);
  double uf = 0.0, dd = 0.0, fd = 0.0;
  for (int x = 0; x < space.size(); ++x) {
    double nu = space.nu(x);
    uf += nu * (u[x] - f[x]) * (u[x] - f[x]);
    dd += nu * div[x] * div[x];
    fd += nu * f[x] * div[x];
  }
  ProxGap g;
  g.primal = total_variation(space, u) + uf / (2.0 * tau);
  g.dual = -fd - 0.5 * tau * dd;
  g.gap = g.primal - g.dual;
  return g;
}

namespace {

struct Group {
  std::vector<int> nodes;
  int lo;
  int hi;
};

// Flux on the edges of each level set that reproduces (u - f) / tau as a
// divergence; edges across level sets carry the sign of the jump.
FluxField recover_flux(const RandomWalkSpace& space, const StateFunction& f, double tau, const StateFunction& u,
                       const std::vector<int>& lo, const std::vector<int>& hi) {
  const int n = space.size();
  FluxField z = FluxField::zero(space);
  std::vector<double> need(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) need[x] = space.nu(x) * (u[x] - f[x]) / tau;
  MaxFlow mf(n + 2);
  const int s = n, t = n + 1;
  std::vector<int> handle(space.edges().size(), -1);
  for (std::size_t k = 0; k < space.edges().size(); ++k) {
    const auto& e = space.edges()[k];
    if (lo[e.a] == lo[e.b]) {
      handle[k] = mf.add_edge(e.a, e.b, e.w, e.w);
      continue;
    }
    z.g[k] = lo[e.b] >= hi[e.a] ? 1.0 : -1.0;
    need[e.a] -= e.w * z.g[k];
    need[e.b] += e.w * z.g[k];
  }
  for (int x = 0; x < n; ++x) {
    if (need[x] > 0.0) mf.add_edge(s, x, need[x]);
    if (need[x] < 0.0) mf.add_edge(x, t, -need[x]);
  }
  mf.solve(s, t);
  for (std::size_t k = 0; k < space.edges().size(); ++k)
    if (handle[k] >= 0) z.g[k] = std::clamp(mf.flow(handle[k]) / space.edges()[k].w, -1.0, 1.0);
  return z;
}

ProxResult prox_parametric(const RandomWalkSpace& space, const StateFunction& f, double tau) {
  const int n = space.size();
  ProxResult res;
  res.u.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<int> lo(static_cast<std::size_t>(n), 0), hi(static_cast<std::size_t>(n), n);
  std::vector<int> local(static_cast<std::size_t>(n), -1);
  std::vector<Group> stack;
  {
    Group all{std::vector<int>(static_cast<std::size_t>(n)), 0, n};
    std::iota(all.nodes.begin(), all.nodes.end(), 0);
    stack.push_back(std::move(all));
  }
  while (!stack.empty()) {
    Group g = std::move(stack.back());
    stack.pop_back();
    const int k = static_cast<int>(g.nodes.size());
    for (int i = 0; i < k; ++i) local[g.nodes[i]] = i;
    std::vector<double> up(static_cast<std::size_t>(k), 0.0), down(static_cast<std::size_t>(k), 0.0);
    double mass = 0.0, vol = 0.0, net = 0.0;
    for (int i = 0; i < k; ++i) {
      int x = g.nodes[i];
      for (const auto& inc : space.incident(x)) {
        int y = inc.other;
        if (local[y] >= 0 && lo[y] == g.lo) continue;
        double w = space.edges()[inc.edge].w;
        if (lo[y] >= g.hi)
          up[i] += w;
        else
          down[i] += w;
      }
      mass += space.nu(x) * f[x];
      vol += space.nu(x);
      net += up[i] - down[i];
    }
    const double level = (mass + tau * net) / vol;
    bool split = false;
    if (k > 1) {
      MaxFlow mf(k + 2);
      const int s = k, t = k + 1;
      for (int i = 0; i < k; ++i) {
        int x = g.nodes[i];
        for (const auto& inc : space.incident(x)) {
          int y = inc.other;
          if (y > x && local[y] >= 0 && lo[y] == g.lo) {
            double w = space.edges()[inc.edge].w;
            mf.add_edge(i, local[y], w, w);
          }
        }
        double c = down[i] - up[i] + space.nu(x) * (level - f[x]) / tau;
        if (c > 0.0) mf.add_edge(i, t, c);
        if (c < 0.0) mf.add_edge(s, i, -c);
      }
      mf.solve(s, t);
      ++res.iterations;
      auto side = mf.source_side();
      Group upper{{}, 0, 0}, lower{{}, 0, 0};
      for (int i = 0; i < k; ++i) (side[i] ? upper : lower).nodes.push_back(g.nodes[i]);
      if (!upper.nodes.empty() && !lower.nodes.empty()) {
        split = true;
        lower.lo = g.lo;
        lower.hi = g.lo + static_cast<int>(lower.nodes.size());
        upper.lo = lower.hi;
        upper.hi = g.hi;
        for (int x : lower.nodes) {
          lo[x] = lower.lo;
          hi[x] = lower.hi;
        }
        for (int x : upper.nodes) {
          lo[x] = upper.lo;
          hi[x] = upper.hi;
        }
        for (int x : g.nodes) local[x] = -1;
        stack.push_back(std::move(lower));
        stack.push_back(std::move(upper));
      }
    }
    if (!split) {
      for (int x : g.nodes) {
        res.u[x] = level;
        local[x] = -1;
      }
    }
  }
  res.z = recover_flux(space, f, tau, res.u, lo, hi);
  res.gap = std::max(0.0, prox_gap(space, f, tau, res.u, res.z).gap);
  res.converged = true;
  return res;
}

ProxResult prox_primal_dual(const RandomWalkSpace& space, const StateFunction& f, double tau, double tol,
                            int max_iters, const FluxField* warm) {
  const int n = space.size();
  const auto& edges = space.edges();
  ProxResult res;
  double l2 = 0.0;
  for (int x = 0; x < n; ++x) l2 = std::max(l2, 2.0 * (1.0 - space.loop(x)));
  FluxField z = warm && warm->g.size() == edges.size() ? *warm : FluxField::zero(space);
  auto finish = [&](bool ok) {
    auto div = divergence(space, z);
    res.u.resize(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) res.u[x] = f[x] + tau * div[x];
    res.z = z;
    res.gap = std::max(0.0, prox_gap(space, f, tau, res.u, z).gap);
    res.converged = ok || res.gap <= tol;
    return res;
  };
  if (l2 <= 0.0 || edges.empty()) return finish(true);

  const double lip = std::sqrt(l2);
  double tp = 1.0 / lip, sigma = 1.0 / lip;
  const double gamma = 1.0 / tau;
  StateFunction u(f), ubar(f), prev(f);
  {
    auto div = divergence(space, z);
    for (int x = 0; x < n; ++x) u[x] = ubar[x] = f[x] + tau * div[x];
  }
  for (int it = 1; it <= max_iters; ++it) {
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      z.g[k] = std::clamp(z.g[k] + sigma * (ubar[e.b] - ubar[e.a]), -1.0, 1.0);
    }
    auto div = divergence(space, z);
    prev = u;
    const double a = tp / tau;
    for (int x = 0; x < n; ++x) u[x] = (u[x] + tp * div[x] + a * f[x]) / (1.0 + a);
    const double theta = 1.0 / std::sqrt(1.0 + 2.0 * gamma * tp);
    tp *= theta;
    sigma /= theta;
    for (int x = 0; x < n; ++x) ubar[x] = u[x] + theta * (u[x] - prev[x]);
    res.iterations = it;
    if (it % 10 == 0) {
      StateFunction uz(static_cast<std::size_t>(n));
      for (int x = 0; x < n; ++x) uz[x] = f[x] + tau * div[x];
      if (prox_gap(space, f, tau, uz, z).gap <= tol) return finish(true);
    }
  }
  return finish(false);
}

}  // namespace

ProxResult tv_prox(const RandomWalkSpace& space, const StateFunction& f, double tau, const ProxOptions& opts) {
  check_size(space, f);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::invalid_argument, "tau must be positive");
  double tol = opts.tolerance > 0.0 ? opts.tolerance : 1e-9 * (1.0 + lp_norm(space, f, 2.0));
  if (opts.method == ProxMethod::parametric_cut) return prox_parametric(space, f, tau);
  return prox_primal_dual(space, f, tau, tol, opts.max_iters, opts.warm_start);
}

}  // namespace tvflow
