#include <benchmark/benchmark.h>

#include "hinv/certainty.hpp"
#include "hinv/inversion.hpp"
#include "hinv/matrix_kit.hpp"

using namespace hinv;

namespace {

FrequencyModel model_with(int k) {
  std::vector<double> w, d;
  for (int j = 0; j < k; ++j) {
    w.push_back(0.7 * j + 0.1);
    d.push_back(1.0 / k);
  }
  return FrequencyModel(w, d);
}

void BM_HarmonicInvert(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto series = synthesize_autocorrelation(model_with(k), SamplingGrid(0.1, n));
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_invert(series, InversionConfig{}));
}
BENCHMARK(BM_HarmonicInvert)->Args({2, 10})->Args({3, 12})->Args({4, 32})->Args({6, 128});

void BM_HermitianSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto s = build_overlap(synthesize_autocorrelation(model_with(3), SamplingGrid(0.1, n)));
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_spectrum(s));
}
BENCHMARK(BM_HermitianSpectrum)->RangeMultiplier(4)->Range(8, 512);

void BM_CertaintyBound(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto m = model_with(k);
  const SamplingGrid g(1e-3, 12);
  for (auto _ : state) benchmark::DoNotOptimize(certainty_bound(m, g, 1e-9));
}
BENCHMARK(BM_CertaintyBound)->DenseRange(2, 5);

void BM_VandermondeExact(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto m = model_with(k);
  const SamplingGrid g(1e-3, 2 * k);
  for (auto _ : state) benchmark::DoNotOptimize(vandermonde_gram_det_exact(m.omegas(), g));
}
BENCHMARK(BM_VandermondeExact)->DenseRange(2, 5);

}  // namespace

BENCHMARK_MAIN();
