#include <benchmark/benchmark.h>

#include "dexp/equilibrium.hpp"
#include "dexp/montecarlo.hpp"
#include "dexp/policy.hpp"
#include "dexp/presets.hpp"
#include "dexp/team.hpp"
#include "dexp/welfare.hpp"

namespace {

void BM_SolveLoading(benchmark::State& state) {
  const auto p = dexp::presets::case2();
  double th = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dexp::solve_loading(p, dexp::Bias{th}, {}, {}));
    th = th > 2.0 ? -0.5 : th + 0.01;
  }
}
BENCHMARK(BM_SolveLoading);

void BM_TeamLoading(benchmark::State& state) {
  const auto p = dexp::presets::case1();
  for (auto _ : state) benchmark::DoNotOptimize(dexp::team_loading(p));
}
BENCHMARK(BM_TeamLoading);

void BM_WelfareLoss(benchmark::State& state) {
  const auto p = dexp::presets::case1();
  for (auto _ : state) benchmark::DoNotOptimize(dexp::welfare_loss(p, dexp::Bias{0.1}));
}
BENCHMARK(BM_WelfareLoss);

void BM_OptimalTheta(benchmark::State& state) {
  const auto p = dexp::presets::case2();
  for (auto _ : state) benchmark::DoNotOptimize(dexp::optimal_theta(p));
}
BENCHMARK(BM_OptimalTheta)->Unit(benchmark::kMillisecond);

void BM_OptimalTax(benchmark::State& state) {
  const auto p = dexp::presets::case2();
  for (auto _ : state) benchmark::DoNotOptimize(dexp::optimal_tax(p, dexp::Bias{0.2}, dexp::TaxRegime::BothSides));
}
BENCHMARK(BM_OptimalTax)->Unit(benchmark::kMillisecond);

// per-agent sampling scales with agents; sufficient statistics does not
void BM_SimulateMarket(benchmark::State& state) {
  auto eq = dexp::equilibrium(dexp::presets::case2(), dexp::Bias{0.3}, dexp::TaxSpec{0.1, dexp::TaxRegime::BothSides});
  dexp::SimConfig cfg;
  cfg.n_reps = 1000;
  cfg.n_agents = static_cast<std::uint64_t>(state.range(0));
  cfg.sampling = state.range(1) == 0 ? dexp::Sampling::SufficientStatistics : dexp::Sampling::PerAgent;
  for (auto _ : state) benchmark::DoNotOptimize(dexp::simulate_market(eq, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_reps));
}
BENCHMARK(BM_SimulateMarket)->Args({10000, 0})->Args({1000, 1})->Args({10000, 1})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
