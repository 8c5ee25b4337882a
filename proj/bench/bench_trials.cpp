// Serial reference vs OpenMP trial runner on reduced table runs.

#include <benchmark/benchmark.h>

#include "hdcml/experiments.h"

namespace {

hdcml::TrialConfig config(benchmark::State& state) {
  hdcml::TrialConfig cfg;
  cfg.trials = 8;
  cfg.pairs = 20;
  cfg.execution = state.range(0) == 0 ? hdcml::Execution::serial : hdcml::Execution::parallel;
  cfg.threads = static_cast<int>(state.range(0));
  return cfg;
}

void BM_Table2(benchmark::State& state) {
  const hdcml::TrialConfig cfg = config(state);
  for (auto _ : state) benchmark::DoNotOptimize(hdcml::run_table2(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}

void BM_Table3(benchmark::State& state) {
  const hdcml::TrialConfig cfg = config(state);
  for (auto _ : state) benchmark::DoNotOptimize(hdcml::run_table3(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}

// range(0): 0 is the serial path, k > 0 the parallel runner with k threads
BENCHMARK(BM_Table2)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Table3)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
