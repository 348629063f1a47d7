#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "tvflow/cheeger.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/iso.hpp"
#include "tvflow/spectral.hpp"

using namespace tvflow;

namespace {

RandomWalkSpace grid(int side) { return stencil_grid(side, side, four_neighbor_stencil(), false); }

StateFunction bump(const RandomWalkSpace& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  StateFunction u(static_cast<std::size_t>(s.size()));
  const int side = static_cast<int>(std::lround(std::sqrt(s.size())));
  for (int x = 0; x < s.size(); ++x) {
    const int i = x % side, j = x / side;
    u[x] = (std::abs(i - side / 2) < side / 4 && std::abs(j - side / 2) < side / 4 ? 1.0 : 0.0) + noise(rng);
  }
  return u;
}

StateSet square(const RandomWalkSpace& s, int side, int k) {
  StateSet e(s.size());
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) e.insert(j * side + i + (side - k) / 2 * (side + 1));
  return e;
}

}  // namespace

static void BM_TotalVariation(benchmark::State& st) {
  auto s = grid(static_cast<int>(st.range(0)));
  auto u = bump(s, 1);
  for (auto _ : st) benchmark::DoNotOptimize(total_variation(s, u));
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(s.edges().size()));
}
BENCHMARK(BM_TotalVariation)->Arg(32)->Arg(128);

static void BM_CheegerExhaustive(benchmark::State& st) {
  auto s = grid(4);
  const int states = static_cast<int>(st.range(0));
  std::vector<int> members(static_cast<std::size_t>(states));
  for (int k = 0; k < states; ++k) members[k] = k;
  auto omega = StateSet::from_indices(s.size(), members);
  for (auto _ : st) benchmark::DoNotOptimize(cheeger_subset_exact(s, omega).value);
}
BENCHMARK(BM_CheegerExhaustive)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_CheegerDinkelbach(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  auto s = grid(side);
  auto omega = StateSet::full(s.size());
  omega.erase(0);
  for (auto _ : st) benchmark::DoNotOptimize(cheeger_subset_dinkelbach(s, omega).value);
}
BENCHMARK(BM_CheegerDinkelbach)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Calibrability(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0));
  auto s = grid(side);
  auto omega = square(s, side, side / 2);
  for (auto _ : st) benchmark::DoNotOptimize(is_calibrable(s, omega).calibrable);
}
BENCHMARK(BM_Calibrability)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_VerifyEigenpair(benchmark::State& st) {
  const int side = static_cast<int>(st.range(0)), k = side / 3;
  auto s = grid(side);
  auto omega = square(s, side, k);
  StateFunction u = indicator(omega);
  for (auto _ : st) benchmark::DoNotOptimize(verify_eigenpair(s, 1.0 / k, u).certified);
}
BENCHMARK(BM_VerifyEigenpair)->Arg(15)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_ProxParametricCut(benchmark::State& st) {
  auto s = grid(static_cast<int>(st.range(0)));
  auto f = bump(s, 2);
  for (auto _ : st) benchmark::DoNotOptimize(tv_prox(s, f, 0.5).gap);
}
BENCHMARK(BM_ProxParametricCut)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_ProxPrimalDual(benchmark::State& st) {
  auto s = grid(static_cast<int>(st.range(0)));
  auto f = bump(s, 2);
  ProxOptions o;
  o.method = ProxMethod::primal_dual;
  for (auto _ : st) benchmark::DoNotOptimize(tv_prox(s, f, 0.5, o).gap);
}
BENCHMARK(BM_ProxPrimalDual)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Evolve(benchmark::State& st) {
  auto s = grid(static_cast<int>(st.range(0)));
  auto u0 = bump(s, 3);
  FlowConfig c;
  c.tau = 0.05;
  c.t_end = 1.0;
  for (auto _ : st) benchmark::DoNotOptimize(evolve(s, u0, c).steps.size());
}
BENCHMARK(BM_Evolve)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_IsoProfile(benchmark::State& st) {
  auto s = stencil_grid(static_cast<int>(st.range(0)), 4, four_neighbor_stencil(), true);
  for (auto _ : st) benchmark::DoNotOptimize(iso_profile(s).breakpoints.size());
}
BENCHMARK(BM_IsoProfile)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_SpectralGap(benchmark::State& st) {
  auto s = grid(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(spectral_gap(s).gap);
}
BENCHMARK(BM_SpectralGap)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
