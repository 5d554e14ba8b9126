// Serial reference kernels against their OpenMP counterparts. Outputs are identical by
// construction (tests check that); only the wall time differs.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "opiqsdc/pulse_sim.hpp"
#include "opiqsdc/sweeps.hpp"

using namespace opiqsdc;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_RateCurve(benchmark::State& state) {
  const SystemParams p;
  const auto grid = distance_grid(0, 500, 0.25);
  const Execution exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(rate_curve(p, grid, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
  state.SetLabel(exec == Execution::Serial ? "serial" : "openmp x" + std::to_string(omp_get_max_threads()));
}
BENCHMARK(BM_RateCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Campaign(benchmark::State& state) {
  const SystemParams p;
  const std::uint64_t n = 1000000;
  const Execution exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_campaign(p, 50.0, n, 1, 8, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
  state.SetLabel(exec == Execution::Serial ? "serial" : "openmp x" + std::to_string(omp_get_max_threads()));
}
BENCHMARK(BM_Campaign)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_OptimizeIntensity(benchmark::State& state) {
  const SystemParams p;
  const Execution exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_intensity(p, 0.005, 0.2, 1e-5, exec));
  state.SetLabel(exec == Execution::Serial ? "serial" : "openmp x" + std::to_string(omp_get_max_threads()));
}
BENCHMARK(BM_OptimizeIntensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
