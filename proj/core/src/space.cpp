#include "tvflow/space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "tvflow/errors.hpp"

namespace tvflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::negative_weight: return "NegativeWeight";
    case ErrorKind::isolated_vertex: return "IsolatedVertex";
    case ErrorKind::disconnected_graph: return "DisconnectedGraph";
    case ErrorKind::stochasticity_violation: return "StochasticityViolation";
    case ErrorKind::detailed_balance_violation: return "DetailedBalanceViolation";
    case ErrorKind::not_connected: return "NotConnected";
    case ErrorKind::not_connected_after_restriction: return "NotConnectedAfterRestriction";
    case ErrorKind::empty_set: return "EmptySet";
    case ErrorKind::overlapping_sets: return "OverlappingSets";
    case ErrorKind::asymmetric_stencil: return "AsymmetricStencil";
    case ErrorKind::too_large: return "TooLargeForExhaustive";
    case ErrorKind::normalization_failure: return "NormalizationFailure";
    case ErrorKind::not_balanced: return "NotBalanced";
    case ErrorKind::nonzero_mean: return "NonzeroMean";
    case ErrorKind::method_unavailable: return "MethodUnavailable";
    case ErrorKind::max_iters_exceeded: return "MaxItersExceeded";
    case ErrorKind::horizon_too_short: return "HorizonTooShort";
    case ErrorKind::trial_not_compactly_supported: return "TrialNotCompactlySupported";
    case ErrorKind::size_mismatch: return "SizeMismatch";
    case ErrorKind::parse_error: return "ParseError";
  }
  return "Unknown";
}

// ---- StateSet ------------------------------------------------------------

StateSet StateSet::from_indices(int universe, const std::vector<int>& members) {
  StateSet s(universe);
  for (int x : members) {
    if (x < 0 || x >= universe) throw Error(ErrorKind::invalid_argument, "state index out of range");
    s.insert(x);
  }
  return s;
}

StateSet StateSet::full(int universe) {
  StateSet s(universe);
  std::fill(s.mask_.begin(), s.mask_.end(), 1);
  return s;
}

StateSet StateSet::of(const RandomWalkSpace& space, const std::vector<std::string>& ids) {
  StateSet s(space.size());
  for (const auto& id : ids) s.insert(space.index(id));
  return s;
}

int StateSet::count() const {
  return static_cast<int>(std::count(mask_.begin(), mask_.end(), 1));
}

std::vector<int> StateSet::indices() const {
  std::vector<int> out;
  for (int x = 0; x < universe(); ++x)
    if (contains(x)) out.push_back(x);
  return out;
}

StateSet StateSet::complement() const {
  StateSet c(universe());
  for (int x = 0; x < universe(); ++x)
    if (!contains(x)) c.insert(x);
  return c;
}

void check_size(const RandomWalkSpace& space, const StateFunction& u) {
  if (static_cast<int>(u.size()) != space.size())
    throw Error(ErrorKind::size_mismatch, "function has " + std::to_string(u.size()) +
                                              " values, space has " + std::to_string(space.size()));
  for (double v : u)
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "function value is not finite");
}

void check_size(const RandomWalkSpace& space, const StateSet& s) {
  if (s.universe() != space.size())
    throw Error(ErrorKind::size_mismatch, "state set is bound to a space of different size");
}

// ---- RandomWalkSpace accessors -------------------------------------------

std::optional<int> RandomWalkSpace::find(std::string_view id) const {
  auto it = lookup_.find(std::string(id));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

int RandomWalkSpace::index(std::string_view id) const {
  auto x = find(id);
  if (!x) throw Error(ErrorKind::invalid_argument, "unknown state '" + std::string(id) + "'");
  return *x;
}

std::span<const int> RandomWalkSpace::row_cols(int x) const {
  auto b = static_cast<std::size_t>(row_ptr_[x]);
  auto e = static_cast<std::size_t>(row_ptr_[x + 1]);
  return {cols_.data() + b, e - b};
}

std::span<const double> RandomWalkSpace::row_vals(int x) const {
  auto b = static_cast<std::size_t>(row_ptr_[x]);
  auto e = static_cast<std::size_t>(row_ptr_[x + 1]);
  return {vals_.data() + b, e - b};
}

double RandomWalkSpace::kernel(int x, int y) const {
  auto cols = row_cols(x);
  auto it = std::lower_bound(cols.begin(), cols.end(), y);
  if (it == cols.end() || *it != y) return 0.0;
  return row_vals(x)[static_cast<std::size_t>(it - cols.begin())];
}

std::span<const Incidence> RandomWalkSpace::incident(int x) const {
  auto b = static_cast<std::size_t>(inc_ptr_[x]);
  auto e = static_cast<std::size_t>(inc_ptr_[x + 1]);
  return {inc_.data() + b, e - b};
}

void RandomWalkSpace::build_index() {
  lookup_.clear();
  for (int x = 0; x < size(); ++x) lookup_.emplace(ids_[x], x);
  std::vector<int> deg(static_cast<std::size_t>(size()) + 1, 0);
  for (const auto& e : edges_) {
    ++deg[e.a + 1];
    ++deg[e.b + 1];
  }
  std::partial_sum(deg.begin(), deg.end(), deg.begin());
  inc_ptr_ = deg;
  inc_.assign(edges_.size() * 2, {});
  std::vector<int> fill(inc_ptr_.begin(), inc_ptr_.end() - 1);
  for (int k = 0; k < static_cast<int>(edges_.size()); ++k) {
    const auto& e = edges_[k];
    inc_[fill[e.a]++] = {e.b, k};
    inc_[fill[e.b]++] = {e.a, k};
  }
}

// ---- construction ----------------------------------------------------------

struct Triplet {
  int x;
  int y;
  double k;
};

struct SpaceBuilder {
  // Validates and assembles. exact_w, when given, maps (a<b) to the edge weight
  // that the caller knows exactly; otherwise the symmetrized nu K is used.
  static RandomWalkSpace build(std::vector<std::string> ids, std::vector<double> nu,
                               std::vector<Triplet> trip, double tolerance,
                               const std::map<std::pair<int, int>, double>* exact_w,
                               ErrorKind disconnect_kind) {
    const int n = static_cast<int>(ids.size());
    if (n == 0) throw Error(ErrorKind::empty_set, "space needs at least one state");
    if (!(tolerance >= 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be nonnegative");
    if (static_cast<int>(nu.size()) != n) throw Error(ErrorKind::size_mismatch, "nu has wrong length");
    {
      std::vector<std::string> sorted = ids;
      std::sort(sorted.begin(), sorted.end());
      auto dup = std::adjacent_find(sorted.begin(), sorted.end());
      if (dup != sorted.end()) throw Error(ErrorKind::invalid_argument, "duplicate state id '" + *dup + "'");
    }
    for (int x = 0; x < n; ++x)
      if (!(nu[x] > 0.0) || !std::isfinite(nu[x]))
        throw Error(ErrorKind::invalid_argument, "nu(" + ids[x] + ") must be positive");

    std::sort(trip.begin(), trip.end(),
              [](const Triplet& a, const Triplet& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    std::vector<Triplet> merged;
    for (const auto& t : trip) {
      if (!(t.k >= 0.0) || !std::isfinite(t.k))
        throw Error(ErrorKind::invalid_argument, "kernel entries must be finite and nonnegative");
      if (!merged.empty() && merged.back().x == t.x && merged.back().y == t.y)
        merged.back().k += t.k;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const Triplet& t) { return t.k == 0.0; });

    RandomWalkSpace s;
    s.ids_ = std::move(ids);
    s.nu_ = std::move(nu);
    s.tolerance_ = tolerance;
    s.total_ = 0.0;
    for (double v : s.nu_) s.total_ += v;
    s.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    s.loop_.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& t : merged) {
      ++s.row_ptr_[t.x + 1];
      s.cols_.push_back(t.y);
      s.vals_.push_back(t.k);
      if (t.x == t.y) s.loop_[t.x] = t.k;
    }
    std::partial_sum(s.row_ptr_.begin(), s.row_ptr_.end(), s.row_ptr_.begin());

    auto& rep = s.report_;
    for (int x = 0; x < n; ++x) {
      double sum = 0.0;
      for (double v : s.row_vals(x)) sum += v;
      double r = std::abs(sum - 1.0);
      if (r > rep.stochasticity_residual || rep.worst_row < 0) {
        rep.stochasticity_residual = r;
        rep.worst_row = x;
      }
    }
    if (rep.stochasticity_residual > tolerance) {
      std::ostringstream os;
      os << "row " << s.ids_[rep.worst_row] << " sums to 1 + " << rep.stochasticity_residual;
      throw Error(ErrorKind::stochasticity_violation, os.str());
    }

    double worst_rel = 0.0;
    for (int x = 0; x < n; ++x) {
      auto cols = s.row_cols(x);
      auto vals = s.row_vals(x);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        int y = cols[k];
        if (y == x) continue;
        double fwd = s.nu_[x] * vals[k];
        double bwd = s.nu_[y] * s.kernel(y, x);
        double r = std::abs(fwd - bwd);
        double rel = r / std::max(1.0, fwd);
        rep.balance_residual = std::max(rep.balance_residual, r);
        if (rel > worst_rel || rep.worst_pair_a < 0) {
          worst_rel = rel;
          rep.worst_pair_a = x;
          rep.worst_pair_b = y;
        }
        if (y > x || s.kernel(y, x) == 0.0) {
          int a = std::min(x, y), b = std::max(x, y);
          double w = 0.5 * (fwd + bwd);
          if (exact_w) {
            auto it = exact_w->find({a, b});
            if (it != exact_w->end()) w = it->second;
          }
          s.edges_.push_back({a, b, w});
        }
      }
    }
    if (worst_rel > tolerance) {
      std::ostringstream os;
      os << "pair (" << s.ids_[rep.worst_pair_a] << ", " << s.ids_[rep.worst_pair_b]
         << ") has nu K mismatch " << rep.balance_residual;
      throw Error(ErrorKind::detailed_balance_violation, os.str());
    }
    std::sort(s.edges_.begin(), s.edges_.end(),
              [](const Edge& p, const Edge& q) { return std::tie(p.a, p.b) < std::tie(q.a, q.b); });
    s.edges_.erase(std::unique(s.edges_.begin(), s.edges_.end(),
                               [](const Edge& p, const Edge& q) { return p.a == q.a && p.b == q.b; }),
                   s.edges_.end());
    s.build_index();

    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (const auto& inc : s.incident(x))
        if (!seen[inc.other]) {
          seen[inc.other] = 1;
          ++reached;
          q.push(inc.other);
        }
    }
    if (reached != n) {
      int lost = static_cast<int>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
      throw Error(disconnect_kind, "state " + s.ids_[lost] + " is not reachable from " + s.ids_[0]);
    }
    return s;
  }

  static RandomWalkSpace from_graph(std::vector<std::string> ids,
                                    const std::map<std::pair<int, int>, double>& w, double tolerance,
                                    ErrorKind disconnect_kind) {
    const int n = static_cast<int>(ids.size());
    std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
    for (const auto& [key, wt] : w) {
      deg[key.first] += wt;
      if (key.first != key.second) deg[key.second] += wt;
    }
    for (int x = 0; x < n; ++x)
      if (deg[x] <= 0.0) throw Error(ErrorKind::isolated_vertex, "vertex " + ids[x] + " has zero degree");
    std::vector<Triplet> trip;
    std::map<std::pair<int, int>, double> exact;
    for (const auto& [key, wt] : w) {
      if (wt == 0.0) continue;
      auto [a, b] = key;
      trip.push_back({a, b, wt / deg[a]});
      if (a != b) {
        trip.push_back({b, a, wt / deg[b]});
        exact[{a, b}] = wt;
      }
    }
    return build(std::move(ids), std::move(deg), std::move(trip), tolerance, &exact, disconnect_kind);
  }
};

RandomWalkSpace from_kernel(std::vector<std::string> states, const std::vector<KernelEntry>& entries,
                            std::vector<double> nu, double tolerance) {
  std::unordered_map<std::string, int> idx;
  for (int x = 0; x < static_cast<int>(states.size()); ++x) idx.emplace(states[x], x);
  std::vector<Triplet> trip;
  trip.reserve(entries.size());
  for (const auto& e : entries) {
    auto a = idx.find(e.from);
    auto b = idx.find(e.to);
    if (a == idx.end() || b == idx.end())
      throw Error(ErrorKind::invalid_argument, "kernel entry names unknown state " +
                                                   (a == idx.end() ? e.from : e.to));
    if (e.value < 0.0) throw Error(ErrorKind::invalid_argument, "negative kernel entry");
    trip.push_back({a->second, b->second, e.value});
  }
  return SpaceBuilder::build(std::move(states), std::move(nu), std::move(trip), tolerance, nullptr,
                             ErrorKind::not_connected);
}

RandomWalkSpace from_weighted_graph(const std::vector<GraphEdge>& edges, bool allow_loops,
                                    double tolerance) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, int> idx;
  auto intern = [&](const std::string& id) {
    auto [it, fresh] = idx.emplace(id, static_cast<int>(ids.size()));
    if (fresh) ids.push_back(id);
    return it->second;
  };
  std::map<std::pair<int, int>, double> w;
  for (const auto& e : edges) {
    if (e.w < 0.0 || !std::isfinite(e.w))
      throw Error(ErrorKind::negative_weight, "edge (" + e.a + ", " + e.b + ") has weight " + std::to_string(e.w));
    int a = intern(e.a), b = intern(e.b);
    if (a == b && !allow_loops) throw Error(ErrorKind::invalid_argument, "self-loop at " + e.a + " not allowed");
    auto key = std::minmax(a, b);
    if (!w.emplace(std::pair{key.first, key.second}, e.w).second)
      throw Error(ErrorKind::invalid_argument, "edge (" + e.a + ", " + e.b + ") listed twice");
  }
  if (ids.empty()) throw Error(ErrorKind::empty_set, "graph has no vertices");
  return SpaceBuilder::from_graph(std::move(ids), w, tolerance, ErrorKind::disconnected_graph);
}

RandomWalkSpace restrict_to(const RandomWalkSpace& space, const StateSet& omega) {
  check_size(space, omega);
  auto members = omega.indices();
  if (members.empty()) throw Error(ErrorKind::empty_set, "cannot restrict to the empty set");
  std::vector<int> local(static_cast<std::size_t>(space.size()), -1);
  for (int k = 0; k < static_cast<int>(members.size()); ++k) local[members[k]] = k;
  std::vector<std::string> ids;
  std::vector<double> nu;
  std::vector<Triplet> trip;
  for (int k = 0; k < static_cast<int>(members.size()); ++k) {
    int x = members[k];
    ids.push_back(space.id(x));
    nu.push_back(space.nu(x));
    double escape = 0.0;
    auto cols = space.row_cols(x);
    auto vals = space.row_vals(x);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      int y = cols[j];
      if (y == x) continue;
      if (local[y] >= 0)
        trip.push_back({k, local[y], vals[j]});
      else
        escape += vals[j];
    }
    double self = space.loop(x) + escape;
    if (self > 0.0) trip.push_back({k, k, self});
  }
  std::map<std::pair<int, int>, double> exact;
  for (const auto& e : space.edges())
    if (local[e.a] >= 0 && local[e.b] >= 0) {
      auto key = std::minmax(local[e.a], local[e.b]);
      exact[{key.first, key.second}] = e.w;
    }
  return SpaceBuilder::build(std::move(ids), std::move(nu), std::move(trip), space.tolerance(), &exact,
                             ErrorKind::not_connected_after_restriction);
}

RandomWalkSpace epsilon_step(const std::vector<Point>& points, double epsilon, double tolerance) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
  const int n = static_cast<int>(points.size());
  if (n == 0) throw Error(ErrorKind::empty_set, "no points");
  const auto dim = points[0].coords.size();
  for (const auto& p : points) {
    if (p.coords.size() != dim) throw Error(ErrorKind::invalid_argument, "points differ in dimension");
    if (!(p.mu > 0.0)) throw Error(ErrorKind::invalid_argument, "point " + p.id + " needs positive mass");
  }
  auto dist2 = [&](int a, int b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      double t = points[a].coords[d] - points[b].coords[d];
      s += t * t;
    }
    return s;
  };
  const double eps2 = epsilon * epsilon;
  std::vector<std::vector<int>> ball(static_cast<std::size_t>(n));
  std::vector<double> mass(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (dist2(a, b) < eps2) {
        ball[a].push_back(b);
        mass[a] += points[b].mu;
      }
  std::vector<std::string> ids;
  std::vector<double> nu;
  std::vector<Triplet> trip;
  std::map<std::pair<int, int>, double> exact;
  for (int a = 0; a < n; ++a) {
    ids.push_back(points[a].id);
    nu.push_back(points[a].mu * mass[a]);
    for (int b : ball[a]) {
      trip.push_back({a, b, points[b].mu / mass[a]});
      if (a < b) exact[{a, b}] = points[a].mu * points[b].mu;
    }
  }
  return SpaceBuilder::build(std::move(ids), std::move(nu), std::move(trip), tolerance, &exact,
                             ErrorKind::not_connected);
}

StateSet neighborhood_closure(const RandomWalkSpace& space, const StateSet& omega) {
  check_size(space, omega);
  StateSet out = omega;
  for (int x = 0; x < space.size(); ++x) {
    if (omega.contains(x)) continue;
    for (int y : space.row_cols(x))
      if (y != x && omega.contains(y)) {
        out.insert(x);
        break;
      }
  }
  return out;
}

std::vector<StencilTap> four_neighbor_stencil(double weight) {
  return {{1, 0, weight}, {-1, 0, weight}, {0, 1, weight}, {0, -1, weight}};
}

std::string grid_id(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

RandomWalkSpace stencil_grid(int width, int height, const std::vector<StencilTap>& stencil, bool wrap,
                             int x0, int y0) {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::invalid_argument, "grid dimensions must be positive");
  std::map<std::pair<int, int>, double> taps;
  for (const auto& t : stencil) {
    if (t.weight < 0.0) throw Error(ErrorKind::negative_weight, "negative stencil weight");
    taps[{t.dx, t.dy}] += t.weight;
  }
  double total = 0.0;
  for (const auto& [off, wt] : taps) {
    total += wt;
    auto mirror = taps.find({-off.first, -off.second});
    if (mirror == taps.end() || mirror->second != wt)
      throw Error(ErrorKind::asymmetric_stencil, "offset (" + std::to_string(off.first) + "," +
                                                     std::to_string(off.second) + ") has no matching negation");
  }
  if (!(total > 0.0)) throw Error(ErrorKind::invalid_argument, "stencil has zero total weight");

  std::vector<std::string> ids;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) ids.push_back(grid_id(x0 + c, y0 + r));
  std::map<std::pair<int, int>, double> w;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      int a = r * width + c;
      for (const auto& [off, wt] : taps) {
        auto [dx, dy] = off;
        if (wt == 0.0) continue;
        if (dx < 0 || (dx == 0 && dy < 0)) continue;
        int cc = c + dx, rr = r + dy;
        if (wrap) {
          cc = ((cc % width) + width) % width;
          rr = ((rr % height) + height) % height;
        } else if (cc < 0 || cc >= width || rr < 0 || rr >= height) {
          continue;
        }
        int b = rr * width + cc;
        auto key = std::minmax(a, b);
        w[{key.first, key.second}] += wt;
      }
    }
  return SpaceBuilder::from_graph(std::move(ids), w, default_tolerance, ErrorKind::disconnected_graph);
}

std::vector<StateSet> support_components(const RandomWalkSpace& space, const StateSet& omega) {
  check_size(space, omega);
  std::vector<StateSet> parts;
  std::vector<char> seen(static_cast<std::size_t>(space.size()), 0);
  for (int s : omega.indices()) {
    if (seen[s]) continue;
    StateSet part(space.size());
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      part.insert(x);
      for (const auto& inc : space.incident(x))
        if (omega.contains(inc.other) && !seen[inc.other]) {
          seen[inc.other] = 1;
          stack.push_back(inc.other);
        }
    }
    parts.push_back(std::move(part));
  }
  return parts;
}

}  // namespace tvflow
