#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "anomaly/evaluation.hpp"
#include "anomaly/series.hpp"

namespace anomaly::testing {

/// Fourteen days of an hourly sinusoid (period 24, amplitude 10, noise 0.1)
/// with one spike.
struct SpikeFixture {
  TimeSeries series;
  std::size_t spike_index = 0;
};

/// Spike of +8 at a seasonal trough: inside the global range but far from
/// the pattern at its cycle position.
SpikeFixture trough_spike(std::uint64_t seed);

/// Spike to three times the global maximum.
SpikeFixture global_spike(std::uint64_t seed);

/// Fourteen days at minute cadence (period 1440, amplitude 10, unit noise)
/// with a contiguous block covering 30% of the series shifted by +10.
struct ContaminationFixture {
  TimeSeries series;
  std::size_t region_start = 0;
  std::size_t region_length = 0;

  bool in_region(std::size_t i) const {
    return i >= region_start && i < region_start + region_length;
  }
};

ContaminationFixture contaminated_block(std::uint64_t seed);

/// Twenty four-week hourly series with one to three harmonics per day.
std::vector<NamedSeries> seasonal_corpus(std::uint64_t seed, std::size_t count = 20);

/// Standard normal sample.
std::vector<double> normal_sample(std::uint64_t seed, std::size_t n);

}  // namespace anomaly::testing
