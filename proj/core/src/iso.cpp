#include "tvflow/iso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "subsets.hpp"
#include "tvflow/errors.hpp"
#include "tvflow/geometry.hpp"

namespace tvflow {

namespace {

using detail::Mask;

struct Slot {
  double volume = 0.0;
  double perimeter = 0.0;
  Mask mask = 0;
};

bool better_slot(const Slot& a, const Slot& b) {
  if (a.perimeter != b.perimeter) return a.perimeter < b.perimeter;
  return detail::lex_less(a.mask, b.mask);
}

// Minimum perimeter per volume bucket; buckets are merged afterwards when
// their volumes agree to the tolerance.
struct VolumeMinima {
  double total = 1.0;
  double quantum = 1e-10;
  std::unordered_map<long long, Slot> slots;

  void visit(Mask mask, double p, double v) {
    if (mask == 0 || v >= total * (1.0 - 1e-13)) return;
    auto key = std::llround(v / quantum);
    Slot s{v, p, mask};
    auto [it, inserted] = slots.try_emplace(key, s);
    if (!inserted && better_slot(s, it->second)) it->second = s;
  }
  void merge(const VolumeMinima& o) {
    for (const auto& [key, s] : o.slots) {
      auto [it, inserted] = slots.try_emplace(key, s);
      if (!inserted && better_slot(s, it->second)) it->second = s;
    }
  }
};

StateSet support(const StateFunction& u) {
  StateSet s(static_cast<int>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0.0) s.insert(static_cast<int>(i));
  return s;
}

// The support of a trial must be a proper subset.
StateSet checked_support(const RandomWalkSpace& space, const StateFunction& u) {
  check_size(space, u);
  auto s = support(u);
  if (s.count() == space.size())
    throw Error(ErrorKind::trial_not_compactly_supported, "trial function is nonzero on every state");
  return s;
}

void fold(InequalityReport& rep, double lhs, double rhs, double slack) {
  ++rep.trials;
  if (lhs <= 0.0) return;
  double r = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  rep.worst_ratio = std::max(rep.worst_ratio, r);
  if (r > 1.0 + slack) rep.holds = false;
}

}  // namespace

IsoProfile iso_profile(const RandomWalkSpace& space, int exhaustive_limit) {
  const int n = space.size();
  if (n > exhaustive_limit || n > 30)
    throw Error(ErrorKind::too_large,
                std::to_string(n) + " states exceed the enumeration limit " + std::to_string(exhaustive_limit));
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  detail::MemberGraph g(space, all);
  VolumeMinima init;
  init.total = space.total_measure();
  init.quantum = init.total * 1e-11;
  auto found = detail::scan_subsets(g, init);

  std::vector<Slot> slots;
  slots.reserve(found.slots.size());
  for (const auto& [key, s] : found.slots) slots.push_back(s);
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.volume < b.volume; });

  IsoProfile prof;
  prof.total = init.total;
  const double tol = init.total * 1e-10;
  std::vector<Slot> merged;
  for (const auto& s : slots) {
    if (!merged.empty() && s.volume - merged.back().volume <= tol) {
      if (better_slot(s, merged.back())) merged.back() = Slot{merged.back().volume, s.perimeter, s.mask};
      continue;
    }
    merged.push_back(s);
  }
  for (const auto& s : merged) {
    auto w = g.to_set(n, s.mask);
    prof.breakpoints.push_back({volume(space, w), perimeter_value(space, w), w});
  }
  return prof;
}

double best_iso_constant(const IsoProfile& profile, double n) {
  if (!(n >= 1.0)) throw Error(ErrorKind::invalid_argument, "the dimension n must be at least 1");
  double best = 0.0;
  for (const auto& b : profile.breakpoints) {
    double lhs = n == 1.0 ? 1.0 : std::pow(b.volume, (n - 1.0) / n);
    best = std::max(best, lhs / b.min_perimeter);
  }
  return best;
}

std::vector<StateFunction> sobolev_trials(const RandomWalkSpace& space, const TrialOptions& opts) {
  const int n = space.size();
  std::vector<StateFunction> out;
  if (n < 2) return out;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const bool all_sets = n < 31 && ((std::int64_t{1} << n) - 2) <= opts.max_indicators;
  if (all_sets) {
    for (std::int64_t m = 1; m + 1 < (std::int64_t{1} << n); ++m) {
      StateFunction u(static_cast<std::size_t>(n), 0.0);
      for (int x = 0; x < n; ++x)
        if (m >> x & 1) u[x] = 1.0;
      out.push_back(std::move(u));
    }
  } else {
    for (int k = 0; k < opts.max_indicators; ++k) {
      StateFunction u(static_cast<std::size_t>(n), 0.0);
      for (int x = 0; x < n; ++x) u[x] = unit(rng) < 0.5 ? 1.0 : 0.0;
      u[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 0.0;
      if (std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; }))
        u[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1.0;
      out.push_back(std::move(u));
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int k = 0; k < opts.random_sparse; ++k) {
    std::shuffle(order.begin(), order.end(), rng);
    int size = std::uniform_int_distribution<int>(1, n - 1)(rng);
    StateFunction u(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < size; ++i) u[order[i]] = 2.0 * unit(rng) - 1.0;
    out.push_back(std::move(u));
  }
  for (int k = 0; k < opts.staircases; ++k) {
    std::shuffle(order.begin(), order.end(), rng);
    int size = std::uniform_int_distribution<int>(1, n - 1)(rng);
    StateFunction u(static_cast<std::size_t>(n), 0.0);
    // Nested prefixes with positive steps give a coarea-built staircase.
    double level = 0.0;
    for (int i = size - 1; i >= 0; --i) {
      level += unit(rng) < 0.3 ? 0.0 : unit(rng);
      u[order[i]] = level > 0.0 ? level : 1.0;
    }
    out.push_back(std::move(u));
  }
  return out;
}

InequalityReport sobolev_check(const RandomWalkSpace& space, double n, double iso_constant,
                               const std::vector<StateFunction>& trials, double slack) {
  if (!(n >= 1.0)) throw Error(ErrorKind::invalid_argument, "the dimension n must be at least 1");
  const double p = n == 1.0 ? 0.0 : n / (n - 1.0);
  InequalityReport rep;
  for (const auto& u : trials) {
    checked_support(space, u);
    fold(rep, lp_norm(space, u, p), iso_constant * total_variation(space, u), slack);
  }
  return rep;
}

PsiTable::PsiTable(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].first > knots_[i - 1].first))
      throw Error(ErrorKind::invalid_argument, "Psi knots must have increasing abscissae");
    if (knots_[i].second > knots_[i - 1].second)
      throw Error(ErrorKind::invalid_argument, "Psi must be nonincreasing");
  }
}

double PsiTable::operator()(double r) const {
  if (knots_.empty()) return 0.0;
  if (r <= knots_.front().first) return knots_.front().second;
  if (r >= knots_.back().first) return knots_.back().second;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), r,
                             [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  return y0 + (y1 - y0) * (r - x0) / (x1 - x0);
}

PsiTable psi_from_profile(const IsoProfile& profile) {
  std::vector<std::pair<double, double>> knots;
  double running = std::numeric_limits<double>::infinity();
  for (const auto& b : profile.breakpoints) {
    running = std::min(running, b.min_perimeter / b.volume);
    knots.emplace_back(b.volume, running);
  }
  return PsiTable(std::move(knots));
}

InequalityReport psi_iso_check(const RandomWalkSpace& space, const PsiTable& psi,
                               const std::vector<StateFunction>& trials, double slack) {
  InequalityReport rep;
  for (const auto& u : trials) {
    auto a = checked_support(space, u);
    fold(rep, psi(volume(space, a)) * lp_norm(space, u, 1.0), total_variation(space, u), slack);
  }
  return rep;
}

double dirichlet_constant(double n, double iso_constant) {
  if (!(n > 2.0)) throw Error(ErrorKind::invalid_argument, "the Dirichlet form inequality needs n > 2");
  return 8.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 2.0)) * iso_constant * iso_constant;
}

InequalityReport dirichlet_sobolev_check(const RandomWalkSpace& space, double n, double c_n,
                                         const std::vector<StateFunction>& trials, double slack) {
  if (!(n > 2.0)) throw Error(ErrorKind::invalid_argument, "the Dirichlet form inequality needs n > 2");
  const double p = 2.0 * n / (n - 2.0);
  InequalityReport rep;
  for (const auto& u : trials) {
    checked_support(space, u);
    double norm = lp_norm(space, u, p);
    fold(rep, norm * norm, c_n * dirichlet_energy(space, u), slack);
  }
  return rep;
}

}  // namespace tvflow
