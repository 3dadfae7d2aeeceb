#include <benchmark/benchmark.h>

#include "frameavg/averaging.hpp"
#include "frameavg/experiments.hpp"

using namespace frameavg;

namespace {

HermitianOperator ising(int n) {
  return build_hamiltonian(LatticeSpec{n}, {Model::kTransverseFieldIsing, {{"J", 1.0}, {"g", 1.0}}});
}

void BM_SpectralDecompose(benchmark::State& state) {
  const HermitianOperator h = ising(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(h));
  state.SetLabel("dim " + std::to_string(h.dim()));
}
BENCHMARK(BM_SpectralDecompose)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_CyclicDecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CyclicBlocks sym(translation_operator(LatticeSpec{n}), n);
  const HermitianOperator h = ising(n);
  std::vector<int> sectors;
  for (auto _ : state) benchmark::DoNotOptimize(sym.decompose(h, sectors));
}
BENCHMARK(BM_CyclicDecompose)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_FrameAverage(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const UnitaryOperator t = translation_operator(LatticeSpec{n});
  const DensityMatrix rho = random_density_matrix(Index{1} << n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(frame_average(rho, t, n));
}
BENCHMARK(BM_FrameAverage)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EvaluateSize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ExperimentConfig cfg;
  cfg.model = {Model::kTransverseFieldIsing, {{"J", 1.0}, {"g", 1.0}}};
  cfg.sizes = {n};
  cfg.beta = 1.0;
  cfg.kick = {0, pauli::x(), 0.7};
  cfg.averaging = {UniformSpatial{}, Temporal{}};
  cfg.record_timing = false;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_size(cfg, n));
}
BENCHMARK(BM_EvaluateSize)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
