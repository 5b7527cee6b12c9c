#include <benchmark/benchmark.h>

#include "steeplab/analysis.hpp"
#include "steeplab/heaviside.hpp"
#include "steeplab/integrator.hpp"
#include "steeplab/scenarios.hpp"
#include "steeplab/sweep.hpp"
#include "steeplab/volterra.hpp"

using namespace steeplab;

// alt-subseq at beta = 10^k: cost should stay flat as the transition layer thins.
static void BM_IntegrateAltSubseq(benchmark::State& state) {
  const Scenario s = builtin("alt-subseq");
  double beta = 1.0;
  for (int k = 0; k < state.range(0); ++k) beta *= 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s, Steepness(beta)));
}
BENCHMARK(BM_IntegrateAltSubseq)->DenseRange(1, 7, 2);

static void BM_IntegrateDecay(benchmark::State& state) {
  const Scenario s = builtin("decay");
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s, Steepness(10.0)));
}
BENCHMARK(BM_IntegrateDecay);

static void BM_HeavisideSolve(benchmark::State& state) {
  const Scenario s = multi_solution(1.2, 0.6, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_heaviside_right_smooth(s));
}
BENCHMARK(BM_HeavisideSolve);

static void BM_VolterraResidual(benchmark::State& state) {
  const Scenario s = multi_solution(1.2, 0.6, 1.0);
  const Trajectory v1 = solve_heaviside_right_smooth(s).trajectory;
  for (auto _ : state)
    benchmark::DoNotOptimize(volterra_residual(v1, s, Steepness::infinite(), static_cast<int>(state.range(0))));
}
BENCHMARK(BM_VolterraResidual)->Arg(1000)->Arg(10000);

static void BM_Diagnostics(benchmark::State& state) {
  const Trajectory v1 = solve_heaviside_right_smooth(multi_solution(1.2, 0.6, 1.0)).trajectory;
  for (auto _ : state) benchmark::DoNotOptimize(threshold_diagnostics(v1, 0.6, 10000, {0.06, 0.006}));
}
BENCHMARK(BM_Diagnostics);

static void BM_SweepAltSubseq(benchmark::State& state) {
  const Scenario s = builtin("alt-subseq");
  SweepOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(s, {1e3, 1e3 + 1, 1e5, 1e5 + 1, 1e7, 1e7 + 1}, opts));
}
BENCHMARK(BM_SweepAltSubseq)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
