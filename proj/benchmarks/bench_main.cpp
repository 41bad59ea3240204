#include <benchmark/benchmark.h>

#include "diskadapt/afr.hpp"
#include "diskadapt/orchestrator.hpp"
#include "diskadapt/reliability.hpp"
#include "diskadapt/simulator.hpp"
#include "diskadapt/suites.hpp"

namespace da = diskadapt;

static void BM_Mttdl(benchmark::State& state) {
  double afr = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(da::mttdl({30, 33}, afr, 0.2));
    afr = afr < 10 ? afr + 0.01 : 1.0;
  }
}
BENCHMARK(BM_Mttdl);

static void BM_ToleratedAfr(benchmark::State& state) {
  const da::ReliabilityConfig rc;
  for (auto _ : state) benchmark::DoNotOptimize(da::tolerated_afr({30, 33}, rc));
}
BENCHMARK(BM_ToleratedAfr);

static void BM_SchemeTable(benchmark::State& state) {
  const da::ReliabilityConfig rc;
  const auto grid = da::scheme_grid();
  for (auto _ : state) benchmark::DoNotOptimize(da::SchemeTable(rc, grid));
}
BENCHMARK(BM_SchemeTable)->Unit(benchmark::kMillisecond);

static const da::ClusterTrace& mixed_trace() {
  static const da::ClusterTrace trace = [] {
    const da::RunConfig c = da::default_mixed_suite();
    return da::generate_trace(*c.generator, c.seed);
  }();
  return trace;
}

static void BM_SmoothedHazard(benchmark::State& state) {
  const auto table = da::exposure_table(mixed_trace(), "S-1", mixed_trace().end_date);
  for (auto _ : state) benchmark::DoNotOptimize(da::smoothed_hazard(table, da::KernelConfig{}));
}
BENCHMARK(BM_SmoothedHazard)->Unit(benchmark::kMillisecond);

static void BM_RateLimiterDay(benchmark::State& state) {
  const auto plans = static_cast<int>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    da::RateLimiter rl;
    for (int i = 0; i < plans; ++i) {
      da::TransitionPlan p;
      p.id = i;
      p.total_read_bytes = 1e15;
      p.earliest_start = da::Date::from_ymd(2020, 1, 1);
      rl.submit(p, i % 8);
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(rl.run_day(da::Date::from_ymd(2020, 1, 1), [](int) { return 1e14; }, 1e16));
  }
}
BENCHMARK(BM_RateLimiterDay)->Arg(8)->Arg(256);

static void BM_SimulateMixed(benchmark::State& state) {
  const da::SimConfig sim = da::default_mixed_suite().sim;
  for (auto _ : state) benchmark::DoNotOptimize(da::run(mixed_trace(), da::PolicyKind::kPacemaker, sim));
}
BENCHMARK(BM_SimulateMixed)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK_MAIN();
