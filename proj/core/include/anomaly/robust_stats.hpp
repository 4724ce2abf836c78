#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace anomaly {

/// Scale that makes the MAD a consistent estimator of the normal sigma.
inline constexpr double kMadConsistencyScale = 1.4826;

struct MeanStd {
  double mean = 0.0;
  double sample_std = 0.0;  // n - 1 denominator
};

struct SummaryStats {
  double mean = 0.0;
  double sample_std = 0.0;
  double median = 0.0;
  double mad = 0.0;  // raw, unscaled
  double mad_consistency_scale = kMadConsistencyScale;

  double scaled_mad() const noexcept { return mad * mad_consistency_scale; }
};

/// Throws StatError for fewer than two values.
MeanStd mean_std(std::span<const double> values);

/// Middle order statistic; the mean of the two middle ones for even length.
double median(std::span<const double> values);

/// median(|x - median(x)|), unscaled.
double mad(std::span<const double> values);

SummaryStats summarize(std::span<const double> values);

/// Trailing simple moving average: element i averages values[i, i + window).
std::vector<double> sma(std::span<const double> values, std::size_t window);

/// y_1 = x_1, y_t = alpha * x_t + (1 - alpha) * y_{t-1}; alpha in (0, 1].
std::vector<double> ewma(std::span<const double> values, double alpha);

/// Probabilistic EWMA.
///
/// Tracks a running mean and standard deviation; each sample's weight is
/// alpha * (1 - beta * P_t) where P_t is the standard normal density of the
/// sample standardized against the previous estimates. Returns the running
/// mean. beta = 0 reduces to ewma(). The standard deviation is floored at
/// 1e-9 and starts at zero (first mean = first sample).
std::vector<double> pewma(std::span<const double> values, double alpha, double beta);

}  // namespace anomaly
