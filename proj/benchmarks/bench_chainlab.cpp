#include <benchmark/benchmark.h>

#include "chainlab/dynamics.hpp"
#include "chainlab/number_theory.hpp"
#include "chainlab/random.hpp"
#include "chainlab/spectral.hpp"

namespace {

using namespace chainlab;

ChainParams chain(int N, int n) {
  ChainParams p;
  p.N = N;
  p.n = n;
  return p;
}

void BM_KrylovDim(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const StiffnessMatrix V = build_stiffness(chain(N, 1));
  for (auto _ : state) benchmark::DoNotOptimize(krylov_dim(V, 1));
  state.SetComplexityN(N);
}
BENCHMARK(BM_KrylovDim)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_ClosedFormSpectrum(benchmark::State& state) {
  const ChainParams p = chain(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_spectrum(p));
}
BENCHMARK(BM_ClosedFormSpectrum)->RangeMultiplier(4)->Range(16, 256);

void BM_NumericSpectrum(benchmark::State& state) {
  const StiffnessMatrix V = build_stiffness(chain(static_cast<int>(state.range(0)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(numeric_spectrum(V));
}
BENCHMARK(BM_NumericSpectrum)->RangeMultiplier(4)->Range(16, 256);

void BM_DimensionSumBrute(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dimension_sum(state.range(0), SumMethod::kBruteForce));
}
BENCHMARK(BM_DimensionSumBrute)->Arg(945)->Arg(100000)->Arg(2027025);

void BM_DimensionSumDivisor(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dimension_sum(state.range(0), SumMethod::kDivisor));
}
BENCHMARK(BM_DimensionSumDivisor)->Arg(945)->Arg(100000)->Arg(2027025);

void BM_MeanDimensions(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mean_dimensions(state.range(0)));
}
BENCHMARK(BM_MeanDimensions)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

// Same time grid (100 units at the guard step) for both propagation routes.
void BM_IntegrateRK4(benchmark::State& state) {
  const ChainParams p = chain(static_cast<int>(state.range(0)), 1);
  const PhaseState psi = gaussian_state(p.N, 1);
  const double dt = default_time_step(p);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(p, psi, 100.0, dt));
}
BENCHMARK(BM_IntegrateRK4)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PropagateExact(benchmark::State& state) {
  const ChainParams p = chain(static_cast<int>(state.range(0)), 1);
  const PhaseState psi = gaussian_state(p.N, 1);
  const double dt = default_time_step(p);
  for (auto _ : state) benchmark::DoNotOptimize(propagate_trajectory(p, psi, 100.0, dt));
}
BENCHMARK(BM_PropagateExact)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PropagatePade(benchmark::State& state) {
  const ChainParams p = chain(static_cast<int>(state.range(0)), 1);
  const PhaseState psi = gaussian_state(p.N, 1);
  const double dt = default_time_step(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_trajectory(p, psi, 100.0, dt, 1, PropagationMethod::kPade));
  }
}
BENCHMARK(BM_PropagatePade)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
