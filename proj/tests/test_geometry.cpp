#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "support/error_kind.hpp"
#include "support/random_space.hpp"
#include "tvflow/geometry.hpp"

using namespace tvflow;
using tvflow::cli::make_fixture;
using tvflow::testing::error_kind;

TEST_CASE("perimeter and volume on the seven-vertex path") {
  auto f = make_fixture("seven-path");
  const auto& s = f.space;
  auto rep = perimeter(s, f.sets.at("omega"));
  CHECK(rep.perimeter == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(rep.volume == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(rep.ratio == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rep.self_interaction == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(ratio(s, f.sets.at("inner")) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(perimeter_value(s, StateSet::full(s.size())) == 0.0);
}

TEST_CASE("empty set has perimeter zero and no ratio") {
  auto f = make_fixture("triangle");
  auto rep = perimeter(f.space, StateSet(f.space.size()));
  CHECK(rep.perimeter == 0.0);
  CHECK_FALSE(rep.ratio_defined);
  CHECK(std::isnan(rep.ratio));
}

TEST_CASE("interaction and union identity") {
  auto f = make_fixture("seven-path");
  const auto& s = f.space;
  auto a = StateSet::of(s, {"x1", "x2"}), b = StateSet::of(s, {"x3"});
  CHECK(interaction(s, a, b) == doctest::Approx(1.0));
  CHECK(union_perimeter_identity_check(s, a, b) <= 1e-14);
  CHECK(error_kind([&] { union_perimeter_identity_check(s, a, a); }) == ErrorKind::overlapping_sets);
}

TEST_CASE("localized perimeter") {
  auto f = make_fixture("eight-path");
  const auto& s = f.space;
  const auto& e = f.sets.at("core");
  CHECK(localized_perimeter(s, e, StateSet::full(s.size())) == doctest::Approx(perimeter_value(s, e)));
  CHECK(localized_perimeter(s, e, StateSet(s.size())) == 0.0);
  // Only the pairs touching the window count: x4 sees x3, x5 is outside.
  CHECK(localized_perimeter(s, e, StateSet::of(s, {"x4"})) == doctest::Approx(1.0));
}

TEST_CASE("total variation, Dirichlet energy and the two-node closed forms") {
  for (double p : {0.1, 0.5, 0.9}) {
    auto f = make_fixture("two-node", {{"p", p}});
    const auto& u = f.functions.at("u0");
    CHECK(total_variation(f.space, u) == doctest::Approx(2.0 * (1.0 - p)));
    CHECK(dirichlet_energy(f.space, u) == doctest::Approx(4.0 * (1.0 - p)));
  }
}

TEST_CASE("coarea formula") {
  auto f = make_fixture("eight-path");
  StateFunction u{3.0, -1.0, 0.5, 0.5, 2.0, -4.0, 0.0, 1.0};
  auto co = coarea_check(f.space, u);
  CHECK(co.lhs == doctest::Approx(total_variation(f.space, u)));
  CHECK(co.residual <= 1e-12);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    auto s = testing::random_space(rng, 9);
    CHECK(coarea_check(s, testing::random_function(rng, 9)).residual <= 1e-10);
  }
}

TEST_CASE("mean curvature of a set") {
  auto f = make_fixture("seven-path");
  const auto& s = f.space;
  auto h = mean_curvature(s, f.sets.at("inner"));
  // x4 has every neighbour inside: H = 1 - 2 = -1.
  CHECK(h[s.index("x4")] == doctest::Approx(-1.0));
  // x3: K(x3, x2) = 1/3 outside, 2/3 inside.
  CHECK(h[s.index("x3")] == doctest::Approx(1.0 - 4.0 / 3.0));
  CHECK(h[s.index("x1")] == doctest::Approx(1.0));
}

TEST_CASE("Lipschitz maps contract total variation") {
  auto f = make_fixture("eight-path");
  StateFunction u{3.0, -1.0, 0.5, 0.5, 2.0, -4.0, 0.0, 1.0};
  PiecewiseLinear clamp({{-1.0, -1.0}, {1.0, 1.0}});
  CHECK(clamp(5.0) == 1.0);
  CHECK(clamp(-0.25) == doctest::Approx(-0.25));
  CHECK(clamp.lipschitz() == doctest::Approx(1.0));
  CHECK(lipschitz_contraction_check(f.space, u, clamp));
  PiecewiseLinear steep({{0.0, 0.0}, {1.0, 3.0}});
  CHECK(steep.lipschitz() == doctest::Approx(3.0));
  CHECK(lipschitz_contraction_check(f.space, u, steep));
}

TEST_CASE("integrals and norms") {
  auto f = make_fixture("two-node");
  StateFunction u{3.0, -1.0};
  CHECK(integral(f.space, u) == doctest::Approx(2.0));
  CHECK(mean(f.space, u) == doctest::Approx(1.0));
  CHECK(lp_norm(f.space, u, 1.0) == doctest::Approx(4.0));
  CHECK(lp_norm(f.space, u, 2.0) == doctest::Approx(std::sqrt(10.0)));
  CHECK(lp_norm(f.space, u, INFINITY) == doctest::Approx(3.0));
  CHECK(indicator(StateSet::from_indices(2, {1})) == StateFunction{0.0, 1.0});
  CHECK(error_kind([&] { total_variation(f.space, {1.0}); }) == ErrorKind::size_mismatch);
}
