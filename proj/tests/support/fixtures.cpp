#include "fixtures.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace anomaly::testing {

namespace {

constexpr std::size_t kHourly = 24;
// Position of the trough of sin(2 pi t / 24).
constexpr std::size_t kTroughPosition = 18;

SeasonalSpec hourly_sinusoid(std::uint64_t seed) {
  SeasonalSpec spec;
  spec.period = kHourly;
  spec.cycles = 14;
  spec.amplitude = 10.0;
  spec.noise_sigma = 0.1;
  spec.seed = seed;
  return spec;
}

SpikeFixture with_spike(const TimeSeries& base, std::size_t index, double value) {
  std::vector<double> values(base.values().begin(), base.values().end());
  values[index] = value;
  return {base.with_values(std::move(values)), index};
}

}  // namespace

SpikeFixture trough_spike(std::uint64_t seed) {
  const TimeSeries base = generate_seasonal(hourly_sinusoid(seed));
  const std::size_t index = 10 * kHourly + kTroughPosition;
  return with_spike(base, index, base[index] + 8.0);
}

SpikeFixture global_spike(std::uint64_t seed) {
  const TimeSeries base = generate_seasonal(hourly_sinusoid(seed));
  const double peak = *std::max_element(base.values().begin(), base.values().end());
  return with_spike(base, 9 * kHourly + 5, 3.0 * peak);
}

ContaminationFixture contaminated_block(std::uint64_t seed) {
  SeasonalSpec spec;
  spec.period = 1440;
  spec.cycles = 14;
  spec.amplitude = 10.0;
  spec.noise_sigma = 1.0;
  spec.seed = seed;
  spec.cadence = 60;
  const TimeSeries base = generate_seasonal(spec);

  ContaminationFixture f;
  const std::size_t n = base.size();
  f.region_length = n * 3 / 10;
  f.region_start = (n - f.region_length) / 2;
  std::vector<double> values(base.values().begin(), base.values().end());
  for (std::size_t i = f.region_start; i < f.region_start + f.region_length; ++i) {
    values[i] += 10.0 * spec.noise_sigma;
  }
  f.series = base.with_values(std::move(values));
  return f;
}

std::vector<NamedSeries> seasonal_corpus(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> amplitude(5.0, 20.0);
  std::vector<NamedSeries> corpus;
  for (std::size_t i = 0; i < count; ++i) {
    SeasonalSpec spec;
    spec.period = kHourly;
    spec.cycles = 28;
    spec.amplitude = amplitude(rng);
    spec.noise_sigma = 1.0;
    spec.modes = 1 + i % 3;
    spec.phases = {phase(rng), phase(rng), phase(rng)};
    spec.seed = seed * 1000 + i;
    corpus.push_back({"series" + std::to_string(i), generate_seasonal(spec)});
  }
  return corpus;
}

std::vector<double> normal_sample(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = dist(rng);
  return out;
}

}  // namespace anomaly::testing
