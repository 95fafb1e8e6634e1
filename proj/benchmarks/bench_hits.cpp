#include <benchmark/benchmark.h>

#include "bclab/bc_stats.hpp"

namespace {

using namespace bclab;

// Whole-pipeline throughput: one orbit of hit counting per iteration.
void BM_RunHitsDoublingAnalytic(benchmark::State& state) {
  MapSystem map = MapSystem::doubling();
  TargetSchedule targets =
      TargetSchedule::analytic_ball(map, 0.3137, MeasureSchedule::power(0.5));
  Orbit orbit;
  orbit.seed = 7;
  orbit.length = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    HitTrace t = run_hits(map, targets, orbit);
    benchmark::DoNotOptimize(t.total_hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunHitsDoublingAnalytic)->Arg(1 << 20);

void BM_RunHitsDoublingLogSchedule(benchmark::State& state) {
  MapSystem map = MapSystem::doubling();
  TargetSchedule targets =
      TargetSchedule::analytic_ball(map, 0.3137, MeasureSchedule::log_over_i(3));
  Orbit orbit;
  orbit.seed = 7;
  orbit.length = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    HitTrace t = run_hits(map, targets, orbit);
    benchmark::DoNotOptimize(t.total_hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunHitsDoublingLogSchedule)->Arg(1 << 20);

void BM_RunHitsIidControl(benchmark::State& state) {
  MapSystem map = MapSystem::iid_control();
  TargetSchedule targets = TargetSchedule::analytic_ball(MapSystem::doubling(), 0.5,
                                                         MeasureSchedule::power(0.5));
  Orbit orbit;
  orbit.seed = 7;
  orbit.length = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    HitTrace t = run_hits(map, targets, orbit);
    benchmark::DoNotOptimize(t.total_hits);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunHitsIidControl)->Arg(1 << 20);

}  // namespace
