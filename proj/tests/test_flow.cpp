#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "support/error_kind.hpp"
#include "support/random_space.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/flux.hpp"
#include "tvflow/geometry.hpp"

using namespace tvflow;
using tvflow::cli::make_fixture;
using tvflow::testing::error_kind;

namespace {

double max_diff(const StateFunction& a, const StateFunction& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("prox on two nodes has a closed form") {
  for (double p : {0.1, 0.5, 0.9})
    for (double tau : {0.1, 0.4, 2.0}) {
      auto f = make_fixture("two-node", {{"p", p}});
      const double a = std::max(0.0, 1.0 - tau * (1.0 - p));
      for (auto m : {ProxMethod::parametric_cut, ProxMethod::primal_dual}) {
        ProxOptions o;
        o.method = m;
        auto r = tv_prox(f.space, {1.0, -1.0}, tau, o);
        INFO("p = " << p << ", tau = " << tau << ", method " << static_cast<int>(m));
        CHECK(r.converged);
        CHECK(max_diff(r.u, {a, -a}) <= 1e-7);
      }
    }
}

TEST_CASE("prox dual flux reproduces the primal and closes the gap") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 25; ++i) {
    const int n = 2 + i % 10;
    auto s = testing::random_space(rng, n);
    auto f = testing::random_function(rng, n);
    const double tau = 0.3;
    auto cut = tv_prox(s, f, tau);
    REQUIRE(cut.converged);
    CHECK(max_abs(cut.z) <= 1.0 + 1e-12);
    auto div = divergence(s, cut.z);
    for (int x = 0; x < n; ++x) CHECK(cut.u[x] == doctest::Approx(f[x] + tau * div[x]).epsilon(1e-9));
    auto gap = prox_gap(s, f, tau, cut.u, cut.z);
    CHECK(gap.gap <= 1e-9 * (1.0 + std::abs(gap.primal)));

    ProxOptions pd;
    pd.method = ProxMethod::primal_dual;
    pd.tolerance = 1e-12;
    auto acc = tv_prox(s, f, tau, pd);
    CHECK(acc.converged);
    CHECK(max_diff(cut.u, acc.u) <= 1e-5);
  }
}

TEST_CASE("prox argument checks") {
  auto f = make_fixture("two-node");
  CHECK(error_kind([&] { tv_prox(f.space, {1.0, 0.0}, 0.0); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([&] { tv_prox(f.space, {1.0}, 1.0); }) == ErrorKind::size_mismatch);
}

TEST_CASE("flow trajectory bookkeeping") {
  auto f = make_fixture("two-node");
  FlowConfig c;
  c.tau = 0.25;
  c.t_end = 1.0;
  c.record_stride = 2;
  auto traj = evolve(f.space, f.functions.at("u0"), c);
  CHECK(traj.steps.size() == 5);
  CHECK(traj.times == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(traj.snapshots.back()[0] == doctest::Approx(0.5));
  for (const auto& st : traj.steps) CHECK(std::abs(st.mass) <= 1e-15);
  CHECK(traj.steps.back().tv == doctest::Approx(0.5));
}

TEST_CASE("flow argument and iteration errors") {
  auto f = make_fixture("seven-path");
  StateFunction u0{1, 0, 3, -2, 0, 1, 4};
  FlowConfig bad;
  bad.tau = -1.0;
  CHECK(error_kind([&] { evolve(f.space, u0, bad); }) == ErrorKind::invalid_argument);
  FlowConfig starved;
  starved.method = ProxMethod::primal_dual;
  starved.max_inner_iters = 3;
  CHECK(error_kind([&] { evolve(f.space, u0, starved); }) == ErrorKind::max_iters_exceeded);
}

TEST_CASE("comparison principle and decay bound on a fixture") {
  auto f = make_fixture("eight-path");
  StateFunction u0{1, 0, 3, -2, 0, 1, 4, 2}, v0{0, 0, 1, -1, 2, 1, 0, 0};
  FlowConfig c;
  c.tau = 0.1;
  c.t_end = 2.0;
  auto cmp = comparison_check(f.space, u0, v0, c);
  CHECK(cmp.holds);
  CHECK(cmp.worst_excess <= 1e-8);
  auto decay = decay_bound_check(f.space, u0, c);
  CHECK(decay.holds);
  CHECK(decay.lambda1 > 0.0);
}

TEST_CASE("dual norm of the two-node datum") {
  for (double p : {0.1, 0.5, 0.9}) {
    auto f = make_fixture("two-node", {{"p", p}});
    auto m = meyer_norm_detail(f.space, {1.0, -1.0});
    CHECK(m.value == doctest::Approx(1.0 / (1.0 - p)).epsilon(1e-12));
    CHECK(m.maximizer.count() == 1);
  }
  auto f = make_fixture("two-node");
  CHECK(error_kind([&] { meyer_norm(f.space, {1.0, 0.0}); }) == ErrorKind::nonzero_mean);
  CHECK(meyer_norm(f.space, {0.0, 0.0}) == 0.0);
}

TEST_CASE("dual norm is the largest <f, chi_E>/P(E)") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const int n = 3 + i % 7;
    auto s = testing::random_space(rng, n);
    auto f = testing::random_function(rng, n);
    const double m = mean(s, f);
    for (auto& v : f) v -= m;
    double best = 0.0;
    for (int mask = 1; mask + 1 < (1 << n); ++mask) {
      StateSet e(n);
      double fe = 0.0;
      for (int x = 0; x < n; ++x)
        if (mask >> x & 1) {
          e.insert(x);
          fe += s.nu(x) * f[x];
        }
      best = std::max(best, fe / perimeter_value(s, e));
    }
    CHECK(meyer_norm(s, f) == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("Poincare constants on two nodes") {
  for (double p : {0.1, 0.5, 0.9}) {
    auto f = make_fixture("two-node", {{"p", p}});
    const auto& s = f.space;
    auto ex = poincare_constant(s, 2.0, 1.0, PoincareMethod::exact_small);
    CHECK(ex.exact);
    CHECK(ex.constant == doctest::Approx(std::sqrt(2.0) * (1.0 - p)).epsilon(1e-14));
    auto an = poincare_constant(s, 2.0, 1.0, PoincareMethod::analytic);
    CHECK(an.constant == doctest::Approx(ex.constant).epsilon(1e-14));
    CHECK(poincare_constant(s, 1.0, 1.0, PoincareMethod::exact_small).constant ==
          doctest::Approx(1.0 - p).epsilon(1e-14));
    CHECK(poincare_constant(s, INFINITY, 1.0, PoincareMethod::exact_small).constant ==
          doctest::Approx(2.0 * (1.0 - p)).epsilon(1e-14));
    auto l22 = poincare_constant(s, 2.0, 2.0, PoincareMethod::exact_small);
    CHECK(l22.constant == doctest::Approx(std::sqrt(2.0 * (1.0 - p))).epsilon(1e-12));
  }
}

TEST_CASE("Poincare estimates bracket the exact constant") {
  for (const char* name : {"seven-path", "eight-path", "triangle"}) {
    auto f = make_fixture(name);
    auto ex = poincare_constant(f.space, 2.0, 1.0, PoincareMethod::exact_small);
    auto ipm = poincare_constant(f.space, 2.0, 1.0, PoincareMethod::ipm);
    INFO(name);
    CHECK_FALSE(ipm.exact);
    CHECK(ipm.lower_bound <= ex.constant + 1e-12);
    CHECK(ipm.constant >= ex.constant - 1e-12);
    CHECK(std::abs(mean(f.space, ex.minimizer)) <= 1e-12);
  }
}

TEST_CASE("Poincare argument checks") {
  auto f = make_fixture("seven-path");
  const auto& s = f.space;
  CHECK(error_kind([&] { poincare_constant(s, 0.5, 1.0, PoincareMethod::exact_small); }) ==
        ErrorKind::invalid_argument);
  CHECK(error_kind([&] { poincare_constant(s, 2.0, 3.0, PoincareMethod::exact_small); }) ==
        ErrorKind::method_unavailable);
  CHECK(error_kind([&] { poincare_constant(s, 2.0, 1.0, PoincareMethod::analytic); }) ==
        ErrorKind::method_unavailable);
  PoincareOptions tiny;
  tiny.max_states = 4;
  CHECK(error_kind([&] { poincare_constant(s, 2.0, 1.0, PoincareMethod::exact_small, tiny); }) ==
        ErrorKind::too_large);
}

TEST_CASE("extinction time sandwich on two nodes") {
  auto f = make_fixture("two-node", {{"p", 0.5}});
  FlowConfig c;
  c.tau = 1e-2;
  c.t_end = 0.0;
  auto ext = extinction_analysis(f.space, f.functions.at("u0"), c);
  CHECK(ext.observed);
  CHECK(ext.holds);
  CHECK(ext.t_lower == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ext.t_upper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(ext.t_observed - 2.0) <= c.tau + 1e-12);

  FlowConfig shortc;
  shortc.tau = 1e-2;
  shortc.t_end = 3.0;
  shortc.extinction_tol = -1.0;
  CHECK(error_kind([&] { extinction_analysis(f.space, f.functions.at("u0"), shortc); }) ==
        ErrorKind::horizon_too_short);
}

TEST_CASE("extinction on a larger graph respects both bounds") {
  auto f = make_fixture("seven-path");
  StateFunction u0{1, 0, 3, -2, 0, 1, 4};
  FlowConfig c;
  c.tau = 0.0;
  c.t_end = 0.0;
  auto ext = extinction_analysis(f.space, u0, c);
  CHECK(ext.observed);
  CHECK(ext.t_lower <= ext.t_upper);
  CHECK(ext.holds);
}
