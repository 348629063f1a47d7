#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "support/error_kind.hpp"
#include "support/random_space.hpp"
#include "tvflow/cheeger.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/iso.hpp"

using namespace tvflow;
using tvflow::cli::make_fixture;
using tvflow::testing::error_kind;

TEST_CASE("isoperimetric profile of K5") {
  auto f = make_fixture("k5");
  auto prof = iso_profile(f.space);
  CHECK(prof.total == doctest::Approx(5.0));
  REQUIRE(prof.breakpoints.size() == 4);
  for (int v = 1; v <= 4; ++v) {
    const auto& b = prof.breakpoints[v - 1];
    CHECK(b.volume == doctest::Approx(v));
    CHECK(b.min_perimeter == doctest::Approx(v * (5.0 - v) / 4.0).epsilon(1e-15));
    CHECK(b.witness.count() == v);
    CHECK(perimeter_value(f.space, b.witness) == doctest::Approx(b.min_perimeter));
  }
  CHECK(best_iso_constant(prof, 2.0) == doctest::Approx(2.0));
  CHECK(best_iso_constant(prof, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("profile on a path and its running-minimum table") {
  auto f = make_fixture("seven-path");
  auto prof = iso_profile(f.space);
  for (const auto& b : prof.breakpoints) CHECK(b.min_perimeter > 0.0);
  auto psi = psi_from_profile(prof);
  double last = INFINITY;
  for (const auto& [v, val] : psi.knots()) {
    CHECK(val <= last);
    last = val;
  }
  for (const auto& b : prof.breakpoints) CHECK(b.volume * psi(b.volume) <= b.min_perimeter + 1e-12);
}

TEST_CASE("psi table interpolation and validation") {
  PsiTable t({{1.0, 2.0}, {3.0, 1.0}});
  CHECK(t(0.5) == 2.0);
  CHECK(t(2.0) == doctest::Approx(1.5));
  CHECK(t(10.0) == 1.0);
  CHECK(error_kind([] { PsiTable({{1.0, 1.0}, {1.0, 0.5}}); }) == ErrorKind::invalid_argument);
  CHECK(error_kind([] { PsiTable({{1.0, 1.0}, {2.0, 1.5}}); }) == ErrorKind::invalid_argument);
}

TEST_CASE("Sobolev inequality with the best constant holds and is tight") {
  auto f = make_fixture("k5");
  auto prof = iso_profile(f.space);
  auto trials = sobolev_trials(f.space);
  CHECK(!trials.empty());
  for (double n : {1.0, 2.0, 3.0}) {
    const double c = best_iso_constant(prof, n);
    auto rep = sobolev_check(f.space, n, c, trials);
    INFO("n = " << n);
    CHECK(rep.holds);
    CHECK(rep.worst_ratio <= 1.0 + 1e-9);
    CHECK(rep.worst_ratio >= 1.0 - 1e-9);  // an indicator attains the constant
    CHECK_FALSE(sobolev_check(f.space, n, 0.5 * c, trials).holds);
  }
}

TEST_CASE("psi inequality on random spaces") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 15; ++i) {
    const int n = 3 + i % 8;
    auto s = testing::random_space(rng, n);
    auto psi = psi_from_profile(iso_profile(s));
    auto rep = psi_iso_check(s, psi, sobolev_trials(s));
    CHECK(rep.holds);
  }
}

TEST_CASE("Dirichlet form inequality") {
  CHECK(dirichlet_constant(3.0, 1.0) == doctest::Approx(32.0));
  CHECK(dirichlet_constant(4.0, 2.0) == doctest::Approx(8.0 * 9.0 / 4.0 * 4.0));
  CHECK(error_kind([] { dirichlet_constant(2.0, 1.0); }) == ErrorKind::invalid_argument);
  auto f = make_fixture("k5");
  auto prof = iso_profile(f.space);
  const double n = 3.0;
  auto rep = dirichlet_sobolev_check(f.space, n, dirichlet_constant(n, best_iso_constant(prof, n)),
                                     sobolev_trials(f.space));
  CHECK(rep.holds);
}

TEST_CASE("trials must vanish somewhere and profiles are size limited") {
  auto f = make_fixture("k5");
  CHECK(error_kind([&] { sobolev_check(f.space, 2.0, 1.0, {{1, 1, 1, 1, 1}}); }) ==
        ErrorKind::trial_not_compactly_supported);
  CHECK(error_kind([&] { iso_profile(f.space, 4); }) == ErrorKind::too_large);
  CHECK(error_kind([&] { best_iso_constant(iso_profile(f.space), 0.5); }) == ErrorKind::invalid_argument);
}

TEST_CASE("the profile recovers the balanced Cheeger constant") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 25; ++i) {
    const int n = 2 + i % 10;
    auto s = testing::random_space(rng, n);
    auto prof = iso_profile(s);
    double best = INFINITY;
    for (const auto& b : prof.breakpoints)
      if (b.volume <= 0.5 * prof.total + 1e-12) best = std::min(best, b.min_perimeter / b.volume);
    CHECK(best == doctest::Approx(cheeger_global(s, GlobalMethod::exhaustive).value).epsilon(1e-12));
  }
}
