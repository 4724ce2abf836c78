#include "anomaly/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "anomaly/errors.hpp"

namespace anomaly {

namespace {

// Median of a scratch buffer, reordering it in place.
double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return lower + (upper - lower) / 2.0;
}

constexpr double kPewmaSigmaFloor = 1e-9;

}  // namespace

MeanStd mean_std(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw StatError(fmt::format("mean_std needs at least 2 values, got {}", n));
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

double median(std::span<const double> values) {
  if (values.empty()) throw StatError("median of an empty sequence");
  std::vector<double> scratch(values.begin(), values.end());
  return median_inplace(scratch);
}

double mad(std::span<const double> values) {
  if (values.empty()) throw StatError("mad of an empty sequence");
  std::vector<double> scratch(values.begin(), values.end());
  const double med = median_inplace(scratch);
  for (double& v : scratch) v = std::fabs(v - med);
  return median_inplace(scratch);
}

SummaryStats summarize(std::span<const double> values) {
  const MeanStd ms = mean_std(values);
  return {ms.mean, ms.sample_std, median(values), mad(values), kMadConsistencyScale};
}

std::vector<double> sma(std::span<const double> values, std::size_t window) {
  if (window == 0) throw StatError("sma window must be positive");
  if (window > values.size()) {
    throw StatError(fmt::format("sma window {} exceeds length {}", window, values.size()));
  }
  std::vector<double> out(values.size() - window + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = i; k < i + window; ++k) sum += values[k];
    out[i] = sum / static_cast<double>(window);
  }
  return out;
}

std::vector<double> ewma(std::span<const double> values, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw StatError(fmt::format("ewma alpha must be in (0, 1], got {}", alpha));
  }
  if (values.empty()) throw StatError("ewma of an empty sequence");
  std::vector<double> out(values.size());
  out[0] = values[0];
  for (std::size_t t = 1; t < values.size(); ++t) {
    out[t] = alpha * values[t] + (1.0 - alpha) * out[t - 1];
  }
  return out;
}

std::vector<double> pewma(std::span<const double> values, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw StatError(fmt::format("pewma alpha must be in (0, 1], got {}", alpha));
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw StatError(fmt::format("pewma beta must be in [0, 1], got {}", beta));
  }
  if (values.empty()) throw StatError("pewma of an empty sequence");

  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<double> out(values.size());
  double s1 = values[0];                // running mean
  double s2 = values[0] * values[0];    // running second moment
  double sigma = 0.0;
  out[0] = s1;
  for (std::size_t t = 1; t < values.size(); ++t) {
    const double x = values[t];
    const double z = (x - s1) / std::max(sigma, kPewmaSigmaFloor);
    const double p = inv_sqrt_2pi * std::exp(-0.5 * z * z);
    const double a = alpha * (1.0 - beta * p);
    s1 = a * x + (1.0 - a) * s1;
    s2 = a * x * x + (1.0 - a) * s2;
    sigma = std::sqrt(std::max(s2 - s1 * s1, 0.0));
    out[t] = s1;
  }
  return out;
}

}  // namespace anomaly
