#include <benchmark/benchmark.h>

#include "swiptsec/channel.hpp"
#include "swiptsec/harness.hpp"
#include "swiptsec/oracle.hpp"
#include "swiptsec/problems.hpp"
#include "swiptsec/schemes.hpp"

using namespace swiptsec;

namespace {

// One relaxed solve per iteration, default system, varying array size.
void BM_Relaxed(benchmark::State& state) {
  const auto p = SystemParams::defaults(static_cast<int>(state.range(0)), 4);
  const auto chan = draw_channel(p, ChannelConfig{}, 11);
  int iters = 0;
  for (auto _ : state) {
    const SchemeResult r = solve_relaxed(p, chan);
    iters = r.iterations;
    benchmark::DoNotOptimize(r.solution.objective);
  }
  state.counters["ipm_iterations"] = iters;
}
BENCHMARK(BM_Relaxed)->Arg(2)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_RelaxedReceivers(benchmark::State& state) {
  const auto p = SystemParams::defaults(6, static_cast<int>(state.range(0)));
  const auto chan = draw_channel(p, ChannelConfig{}, 11);
  for (auto _ : state) benchmark::DoNotOptimize(solve_relaxed(p, chan).solution.objective);
}
BENCHMARK(BM_RelaxedReceivers)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Scheme2(benchmark::State& state) {
  const auto p = SystemParams::defaults(6, 4);
  const auto chan = draw_channel(p, ChannelConfig{}, 11);
  SchemeOptions o;
  o.parallel_scheme2 = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_scheme2(p, chan, o).solution.objective);
}
BENCHMARK(BM_Scheme2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Baseline1(benchmark::State& state) {
  const auto p = SystemParams::defaults(6, 4);
  const auto chan = draw_channel(p, ChannelConfig{}, 11);
  for (auto _ : state) benchmark::DoNotOptimize(solve_baseline(p, chan, 1).solution.objective);
}
BENCHMARK(BM_Baseline1)->Unit(benchmark::kMillisecond);

void BM_BuildRelaxed(benchmark::State& state) {
  const auto p = SystemParams::defaults(6, 8);
  const auto chan = draw_channel(p, ChannelConfig{}, 11);
  for (auto _ : state) benchmark::DoNotOptimize(build_relaxed(p, chan).rows.size());
}
BENCHMARK(BM_BuildRelaxed);

void BM_Oracle(benchmark::State& state) {
  const auto p = SystemParams::defaults(2, 2);
  const auto chan = draw_channel(p, ChannelConfig{}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle(p, chan).objective);
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond)->Iterations(3);

// Trial throughput of the sweep with a single worker.
void BM_SweepPoint(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.sweeps = {{SweepAxis::GammaReqDb, {9}}};
  cfg.trials = 8;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg).records.size());
  state.SetItemsProcessed(state.iterations() * cfg.trials);
}
BENCHMARK(BM_SweepPoint)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
