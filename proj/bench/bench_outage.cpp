#include <benchmark/benchmark.h>

#include "dmtsim/analysis.hpp"
#include "dmtsim/receiver.hpp"

using namespace dmtsim;

namespace {

SystemConfig bench_config(int interferers, std::int64_t trials) {
  SystemConfig c;
  c.M = 2;
  c.N = 4;
  c.num_interferers = interferers;
  c.xi = 0.5;
  c.snr_grid_db = {25.0};
  c.rate = FixedRate{5.0};
  c.trials_per_point = trials;
  return validated(c);
}

void BM_EvaluateMmse(benchmark::State& state) {
  const auto config = bench_config(static_cast<int>(state.range(0)), 1000);
  const auto real = sample_realization(config, std::size_t{0}, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_mmse(real));
  }
}
BENCHMARK(BM_EvaluateMmse)->Arg(0)->Arg(1)->Arg(3)->Arg(6);

void BM_OutageSerial(benchmark::State& state) {
  const auto config = bench_config(3, state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_outage_serial(config, 0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutageSerial)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_OutageParallel(benchmark::State& state) {
  const auto config = bench_config(3, state.range(0));
  const int previous = max_workers();
  set_workers(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_outage_at(config, 0));
  }
  set_workers(previous);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutageParallel)
    ->ArgsProduct({{20000}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
