#include <benchmark/benchmark.h>

#include "bclab/maps.hpp"
#include "bclab/rng.hpp"

namespace {

using namespace bclab;

void BM_EvalLsv(benchmark::State& state) {
  MapSystem map = MapSystem::lsv(0.6);
  double x = 0.234;
  for (auto _ : state) {
    x = map.eval(x);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_EvalLsv);

void BM_EvalChmvLeftBranch(benchmark::State& state) {
  MapSystem map = MapSystem::chmv(3.0);
  for (auto _ : state) {
    double y = map.eval(0.1);  // closed-form branch
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_EvalChmvLeftBranch);

void BM_EvalChmvRightBranch(benchmark::State& state) {
  MapSystem map = MapSystem::chmv(3.0);
  for (auto _ : state) {
    double y = map.eval(0.7);  // Newton/bisection branch
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_EvalChmvRightBranch);

void BM_EvalChmvRightBranchFractionalGamma(benchmark::State& state) {
  MapSystem map = MapSystem::chmv(2.7);
  for (auto _ : state) {
    double y = map.eval(0.7);
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_EvalChmvRightBranchFractionalGamma);

void BM_ChmvOrbit(benchmark::State& state) {
  MapSystem map = MapSystem::chmv(3.0);
  Orbit orbit;
  orbit.seed = 1;
  OrbitStream stream(map, orbit);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.step());
  }
}
BENCHMARK(BM_ChmvOrbit);

void BM_DoublingBitOrbit(benchmark::State& state) {
  MapSystem map = MapSystem::doubling();
  Orbit orbit;
  orbit.seed = 1;
  OrbitStream stream(map, orbit);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.step());
  }
}
BENCHMARK(BM_DoublingBitOrbit);

void BM_CounterRng(benchmark::State& state) {
  CounterRng rng(1, Stream::orbit_bits, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.next_u64());
  }
}
BENCHMARK(BM_CounterRng);

void BM_BackwardSequence(benchmark::State& state) {
  for (auto _ : state) {
    auto seq = chmv_backward_sequence(3.0, static_cast<std::uint64_t>(state.range(0)));
    benchmark::DoNotOptimize(seq.a.back());
  }
}
BENCHMARK(BM_BackwardSequence)->Arg(10000)->Arg(100000);

}  // namespace
