#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anomaly/series.hpp"

namespace anomaly {

enum class ResidualVariant {
  classic,  // R = X - T - S
  median,   // R = X - S - median(X)
};

/// Additive decomposition X = S + T + R (classic) or X = S + median(X) + R.
struct Decomposition {
  std::vector<double> seasonal;
  std::vector<double> trend;
  std::vector<double> residual;
  double series_median = 0.0;
  ResidualVariant variant = ResidualVariant::classic;
  /// Robustness weights used by the final seasonal smoothing pass (all 1
  /// when no robustness iteration ran).
  std::vector<double> weights;
};

struct StlConfig {
  std::size_t period = 0;
  unsigned inner_iterations = 2;
  /// Robustness passes; 0 disables bisquare reweighting.
  unsigned outer_iterations = 1;
  /// Fraction of each sub-cycle series used as the LOESS neighbourhood.
  double seasonal_span = 0.75;
  int seasonal_degree = 0;
  /// Trend moving-average width. 0 selects the period-matched filter: width
  /// period + 1 with half-weighted endpoints for even periods, width period
  /// for odd ones. Any other value must be odd.
  std::size_t trend_window = 0;
  /// Inner iterations stop once the largest change in trend or seasonal,
  /// relative to the range of the input, drops below this.
  double convergence_epsilon = 1e-6;
};

/// Locally weighted regression evaluated at every x.
///
/// Each fit uses the ceil(span * n) nearest neighbours with tricube distance
/// weights, multiplied by the optional robustness weights. degree is 0
/// (local mean) or 1 (local line). A neighbourhood whose weights are all
/// zero falls back to its unweighted mean.
std::vector<double> loess_smooth(std::span<const double> x, std::span<const double> y,
                                 double span, int degree,
                                 std::span<const double> weights = {});

/// (1 - u^2)^2 on [0, 1), 0 from 1 on.
double bisquare(double u);

/// B(|r| / (6 median|r|)); all ones when the median absolute residual is 0.
std::vector<double> robustness_weights(std::span<const double> residual);

/// Centered moving average with the first/last half-width points filled by
/// the nearest interior value. See StlConfig::trend_window for `window`.
std::vector<double> centered_moving_average(std::span<const double> values, std::size_t period,
                                            std::size_t window = 0);

/// Moving-average trend plus per-position seasonal means of the detrended
/// interior, centered to sum to zero over a cycle.
Decomposition classical_decompose(const TimeSeries& series, std::size_t period);

/// Iterated moving-average trend and LOESS-smoothed sub-cycle seasonal, with
/// optional bisquare robustness reweighting.
Decomposition stl_decompose(const TimeSeries& series, const StlConfig& config);

/// Replaces the trend in the residual with the median of the raw series.
Decomposition median_residual(const TimeSeries& series, Decomposition decomposition);

}  // namespace anomaly
