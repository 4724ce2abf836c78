#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "anomaly/decomposition.hpp"
#include "anomaly/detectors.hpp"
#include "anomaly/evaluation.hpp"

namespace {

using namespace anomaly;

// Four weeks of minute data with a daily cycle.
TimeSeries minute_series() {
  SeasonalSpec spec;
  spec.period = 1440;
  spec.cycles = 28;
  spec.cadence = 60;
  spec.noise_sigma = 1.0;
  spec.seed = 3;
  return generate_seasonal(spec);
}

std::vector<double> normal_values(std::size_t n) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void BM_Esd(benchmark::State& state, bool hybrid) {
  const auto values = normal_values(static_cast<std::size_t>(state.range(0)));
  EsdOptions options;
  options.hybrid = hybrid;
  options.max_outliers = values.size() / 10;
  for (auto _ : state) benchmark::DoNotOptimize(esd(values, options));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Esd, classical, false)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();
BENCHMARK_CAPTURE(BM_Esd, hybrid, true)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_Stl(benchmark::State& state) {
  const auto series = minute_series();
  StlConfig config;
  config.period = 1440;
  config.outer_iterations = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stl_decompose(series, config));
}
BENCHMARK(BM_Stl)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state, Algorithm algorithm) {
  const auto series = minute_series();
  DetectorConfig config;
  config.algorithm = algorithm;
  config.period = 1440;
  for (auto _ : state) benchmark::DoNotOptimize(detect(series, config));
}
BENCHMARK_CAPTURE(BM_Detect, three_sigma, Algorithm::three_sigma)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Detect, esd, Algorithm::esd)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Detect, s_esd, Algorithm::s_esd)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Detect, s_h_esd, Algorithm::s_h_esd)->Unit(benchmark::kMillisecond);

void BM_ClassicalDecompose(benchmark::State& state) {
  const auto series = minute_series();
  for (auto _ : state) benchmark::DoNotOptimize(classical_decompose(series, 1440));
}
BENCHMARK(BM_ClassicalDecompose)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
