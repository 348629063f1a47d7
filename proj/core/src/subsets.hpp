#pragma once

// Gray-code enumeration of all subsets of a member list with incrementally
// maintained perimeter and volume. Internal to the core library.

#include <bit>
#include <cstdint>
#include <vector>

#include "tvflow/errors.hpp"
#include "tvflow/parallel.hpp"
#include "tvflow/space.hpp"

namespace tvflow::detail {

using Mask = std::uint32_t;

struct MemberGraph {
  std::vector<int> members;
  std::vector<double> nu;
  std::vector<double> degree;  // off-diagonal weight leaving the member
  std::vector<std::vector<std::pair<int, double>>> adj;  // member-local neighbours

  MemberGraph(const RandomWalkSpace& space, std::vector<int> m) : members(std::move(m)) {
    const int k = static_cast<int>(members.size());
    std::vector<int> local(static_cast<std::size_t>(space.size()), -1);
    for (int i = 0; i < k; ++i) local[members[i]] = i;
    nu.resize(k);
    degree.assign(k, 0.0);
    adj.resize(k);
    for (int i = 0; i < k; ++i) {
      int x = members[i];
      nu[i] = space.nu(x);
      for (const auto& inc : space.incident(x)) {
        double w = space.edges()[inc.edge].w;
        degree[i] += w;
        if (local[inc.other] >= 0) adj[i].push_back({local[inc.other], w});
      }
    }
  }

  int size() const { return static_cast<int>(members.size()); }

  double perimeter(Mask mask) const {
    double p = 0.0;
    for (int i = 0; i < size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      double inside = 0.0;
      for (auto [j, w] : adj[i])
        if (mask >> j & 1u) inside += w;
      p += degree[i] - inside;
    }
    return p;
  }

  double volume(Mask mask) const {
    double v = 0.0;
    for (int i = 0; i < size(); ++i)
      if (mask >> i & 1u) v += nu[i];
    return v;
  }

  StateSet to_set(int universe, Mask mask) const {
    StateSet s(universe);
    for (int i = 0; i < size(); ++i)
      if (mask >> i & 1u) s.insert(members[i]);
    return s;
  }
};

// Lexicographic order of the sorted member lists encoded by two masks.
inline bool lex_less(Mask a, Mask b) {
  if (a == b) return false;
  int m = std::countr_zero(a ^ b);
  if (a >> m & 1u) return (b >> m) != 0;
  return (a >> m) == 0;
}

// Calls acc.visit(mask, perimeter, volume) for every subset (including the
// empty set), chunk by chunk, then folds the chunk accumulators in order with
// acc.merge(other). Deterministic regardless of the thread schedule.
template <class Acc>
Acc scan_subsets(const MemberGraph& g, const Acc& init) {
  const int k = g.size();
  if (k > 30) throw Error(ErrorKind::too_large, "subset scan limited to 30 members");
  const int low = std::min(k, 12);
  const int chunks = 1 << (k - low);
  std::vector<Acc> parts(static_cast<std::size_t>(chunks), init);
  parallel_for(chunks, [&](int c) {
    Acc& acc = parts[static_cast<std::size_t>(c)];
    Mask mask = static_cast<Mask>(c) << low;
    double p = g.perimeter(mask);
    double v = g.volume(mask);
    acc.visit(mask, p, v);
    const Mask steps = Mask{1} << low;
    for (Mask s = 1; s < steps; ++s) {
      int i = std::countr_zero(s);
      double inside = 0.0;
      for (auto [j, w] : g.adj[i])
        if (mask >> j & 1u) inside += w;
      if (mask >> i & 1u) {
        p -= g.degree[i] - 2.0 * inside;
        v -= g.nu[i];
      } else {
        p += g.degree[i] - 2.0 * inside;
        v += g.nu[i];
      }
      mask ^= Mask{1} << i;
      acc.visit(mask, p, v);
    }
  });
  Acc out = init;
  for (auto& part : parts) out.merge(part);
  return out;
}

}  // namespace tvflow::detail
