#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "random_space.hpp"
#include "tvflow/cheeger.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/iso.hpp"

namespace tvflow::testing {

namespace {

// One property: body returns the measured quantity, passes when it is <= bound.
struct Property {
  std::string name;
  double bound;
  std::function<double(std::mt19937_64&, int)> measure;
};

std::vector<Property> properties() {
  std::vector<Property> out;
  out.push_back({"coarea residual", 1e-10, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   return coarea_check(s, random_function(rng, n)).residual;
                 }});
  out.push_back({"union identity residual", 1e-12, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   StateSet a(n), b(n);
                   std::uniform_int_distribution<int> side(0, 2);
                   for (int x = 0; x < n; ++x) {
                     const int k = side(rng);
                     if (k == 0) a.insert(x);
                     if (k == 1) b.insert(x);
                   }
                   return union_perimeter_identity_check(s, a, b);
                 }});
  out.push_back({"interaction symmetry", 1e-12, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   auto a = random_set(rng, n), b = random_set(rng, n);
                   return std::abs(interaction(s, a, b) - interaction(s, b, a));
                 }});
  out.push_back({"mass drift along flows", 1e-8, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   auto u0 = random_function(rng, n);
                   FlowConfig c;
                   c.tau = 0.05;
                   c.t_end = 1.0;
                   auto traj = evolve(s, u0, c);
                   double drift = 0.0;
                   for (const auto& st : traj.steps) drift = std::max(drift, std::abs(st.mass - traj.steps[0].mass));
                   return drift / std::max(1.0, lp_norm(s, u0, 1.0));
                 }});
  out.push_back({"TV increase along flows", 0.0, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   auto u0 = random_function(rng, n);
                   FlowConfig c;
                   c.tau = 0.05;
                   c.t_end = 1.0;
                   auto traj = evolve(s, u0, c);
                   const double tol = 1e-9 * (1.0 + lp_norm(s, u0, 2.0));
                   double rise = -1.0;
                   for (std::size_t k = 1; k < traj.steps.size(); ++k)
                     rise = std::max(rise, traj.steps[k].tv - traj.steps[k - 1].tv - tol);
                   return std::max(rise, 0.0);
                 }});
  out.push_back({"comparison principle excess over slack", 0.0, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   auto u0 = random_function(rng, n), v0 = random_function(rng, n);
                   FlowConfig c;
                   c.tau = 0.05;
                   c.t_end = 0.5;
                   auto rep = comparison_check(s, u0, v0, c);
                   return rep.holds ? 0.0 : std::max(rep.worst_excess, 1e-300);
                 }});
  out.push_back({"dinkelbach minus exhaustive", 1e-12, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   auto omega = random_set(rng, n, false);
                   double a = cheeger_subset_dinkelbach(s, omega).value;
                   double b = cheeger_subset_exact(s, omega).value;
                   return std::abs(a - b) / std::max(1.0, b);
                 }});
  out.push_back({"h minus certified lambda", 1e-9, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   const double h = cheeger_global(s, GlobalMethod::exhaustive).value;
                   double worst = 0.0;
                   for (const auto& hit : set_eigenpair_search(s))
                     if (hit.lambda > 0.0) worst = std::max(worst, h - hit.lambda);
                   return worst;
                 }});
  out.push_back({"sobolev ratio with the best constant", 1.0 + 1e-9, [](std::mt19937_64& rng, int n) {
                   auto s = random_space(rng, n);
                   auto prof = iso_profile(s);
                   TrialOptions t;
                   t.seed = rng();
                   t.random_sparse = 16;
                   t.staircases = 16;
                   auto trials = sobolev_trials(s, t);
                   double worst = 0.0;
                   for (double dim : {1.0, 2.0, 3.0}) {
                     auto rep = sobolev_check(s, dim, best_iso_constant(prof, dim), trials);
                     worst = std::max(worst, rep.worst_ratio);
                   }
                   return worst;
                 }});
  return out;
}

}  // namespace

std::vector<PropertyOutcome> run_property_suites(int instances, std::uint64_t seed) {
  std::vector<PropertyOutcome> out;
  std::uint64_t salt = 0;
  for (const auto& prop : properties()) {
    PropertyOutcome o;
    o.name = prop.name;
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * ++salt);
    std::uniform_int_distribution<int> size(2, 12);
    for (int i = 0; i < instances; ++i) {
      const int n = size(rng);
      const double v = prop.measure(rng, n);
      ++o.instances;
      o.worst = std::max(o.worst, v);
      if (!(v <= prop.bound)) {
        if (o.failures++ == 0) {
          std::ostringstream os;
          os << "instance " << i << " (n = " << n << "): " << v << " > " << prop.bound;
          o.first_failure = os.str();
        }
      }
    }
    out.push_back(o);
  }
  return out;
}

}  // namespace tvflow::testing
