#include "anomaly/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "anomaly/errors.hpp"
#include "anomaly/robust_stats.hpp"

namespace anomaly {

namespace {

struct TrendFilter {
  std::size_t half_width;
  bool half_weighted_ends;  // the 2 x period filter for even periods
};

TrendFilter resolve_trend_filter(std::size_t period, std::size_t window) {
  if (period == 0) throw DecompError("period must be positive");
  if (window == 0) {
    if (period % 2 == 0) return {period / 2, true};
    return {period / 2, false};
  }
  if (window == period + 1 && period % 2 == 0) return {period / 2, true};
  if (window % 2 == 0) {
    throw DecompError(fmt::format("trend window {} must be odd", window));
  }
  return {window / 2, false};
}

double value_range(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

void check_decomposable(const TimeSeries& series, std::size_t period) {
  if (period < 2) throw DecompError(fmt::format("period must be at least 2, got {}", period));
  if (series.size() < 2 * period) {
    throw DecompError(fmt::format("series of length {} is shorter than two periods ({})",
                                  series.size(), 2 * period));
  }
}

// Subtracts the mean of each full cycle; a trailing partial cycle uses the
// mean of the last `period` values.
void center_per_cycle(std::vector<double>& seasonal, std::size_t period) {
  const std::size_t n = seasonal.size();
  const std::size_t full = n / period;
  std::vector<double> means(full + 1, 0.0);
  for (std::size_t c = 0; c < full; ++c) {
    double sum = 0.0;
    for (std::size_t i = c * period; i < (c + 1) * period; ++i) sum += seasonal[i];
    means[c] = sum / static_cast<double>(period);
  }
  if (n % period != 0) {
    double sum = 0.0;
    for (std::size_t i = n - period; i < n; ++i) sum += seasonal[i];
    means[full] = sum / static_cast<double>(period);
  }
  for (std::size_t i = 0; i < n; ++i) seasonal[i] -= means[i / period];
}

std::vector<double> subcycle_seasonal(std::span<const double> detrended, std::size_t period,
                                      double span, int degree, std::span<const double> weights) {
  const std::size_t n = detrended.size();
  std::vector<double> seasonal(n, 0.0);
  std::vector<double> xs, ys, ws;
  for (std::size_t pos = 0; pos < period; ++pos) {
    xs.clear();
    ys.clear();
    ws.clear();
    for (std::size_t i = pos, k = 0; i < n; i += period, ++k) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(detrended[i]);
      ws.push_back(weights[i]);
    }
    const auto fit = loess_smooth(xs, ys, span, degree, ws);
    for (std::size_t i = pos, k = 0; i < n; i += period, ++k) seasonal[i] = fit[k];
  }
  return seasonal;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

std::vector<double> loess_smooth(std::span<const double> x, std::span<const double> y,
                                 double span, int degree, std::span<const double> weights) {
  const std::size_t n = x.size();
  if (y.size() != n) throw DecompError("loess: x and y lengths differ");
  if (!weights.empty() && weights.size() != n) throw DecompError("loess: weights length differs");
  if (degree != 0 && degree != 1) throw DecompError("loess: degree must be 0 or 1");
  if (!(span > 0.0 && span <= 1.0)) {
    throw DecompError(fmt::format("loess: span must be in (0, 1], got {}", span));
  }
  if (n == 0) return {};
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) throw DecompError("loess: x must be strictly increasing");
  }
  auto q = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n) - 1e-9));
  q = std::clamp<std::size_t>(q, 1, n);
  if (q < static_cast<std::size_t>(degree) + 1) {
    throw DecompError(fmt::format("loess: span {} leaves {} neighbours for degree {}", span, q,
                                  degree));
  }

  std::vector<double> fitted(n);
  std::vector<double> w(q);
  std::size_t lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    while (lo + q < n && xi - x[lo] > x[lo + q] - xi) ++lo;
    const std::size_t hi = lo + q;  // exclusive
    const double h = std::max(xi - x[lo], x[hi - 1] - xi);

    double wsum = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      double wt = 1.0;
      if (h > 0.0) {
        const double r = std::fabs(x[j] - xi);
        if (r > 0.999 * h) {
          wt = 0.0;
        } else if (r > 0.001 * h) {
          const double u = r / h;
          const double c = 1.0 - u * u * u;
          wt = c * c * c;
        }
      }
      if (!weights.empty()) wt *= weights[j];
      w[j - lo] = wt;
      wsum += wt;
    }

    if (!(wsum > 0.0)) {
      double sum = 0.0;
      for (std::size_t j = lo; j < hi; ++j) sum += y[j];
      fitted[i] = sum / static_cast<double>(q);
      continue;
    }

    double xbar = 0.0, ybar = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      xbar += w[j - lo] * x[j];
      ybar += w[j - lo] * y[j];
    }
    xbar /= wsum;
    ybar /= wsum;
    if (degree == 0) {
      fitted[i] = ybar;
      continue;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      const double dx = x[j] - xbar;
      sxx += w[j - lo] * dx * dx;
      sxy += w[j - lo] * dx * (y[j] - ybar);
    }
    // Collinear neighbourhood (one effective point): local mean.
    if (sxx > 1e-12 * wsum * std::max(h * h, 1e-300)) {
      fitted[i] = ybar + (sxy / sxx) * (xi - xbar);
    } else {
      fitted[i] = ybar;
    }
  }
  return fitted;
}

double bisquare(double u) {
  const double a = std::fabs(u);
  if (a >= 1.0) return 0.0;
  const double c = 1.0 - a * a;
  return c * c;
}

std::vector<double> robustness_weights(std::span<const double> residual) {
  std::vector<double> abs_r(residual.size());
  std::transform(residual.begin(), residual.end(), abs_r.begin(),
                 [](double r) { return std::fabs(r); });
  std::vector<double> weights(residual.size(), 1.0);
  if (residual.empty()) return weights;
  const double h = 6.0 * median(abs_r);
  if (!(h > 0.0)) return weights;
  for (std::size_t i = 0; i < abs_r.size(); ++i) weights[i] = bisquare(abs_r[i] / h);
  return weights;
}

std::vector<double> centered_moving_average(std::span<const double> values, std::size_t period,
                                            std::size_t window) {
  const TrendFilter f = resolve_trend_filter(period, window);
  const std::size_t n = values.size();
  const std::size_t span = 2 * f.half_width + 1;
  if (n < span) {
    throw DecompError(fmt::format("series of length {} is shorter than the trend window {}", n,
                                  span));
  }
  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + values[i];

  std::vector<double> trend(n);
  const std::size_t h = f.half_width;
  for (std::size_t i = h; i + h < n; ++i) {
    if (f.half_weighted_ends) {
      const long double inner = prefix[i + h] - prefix[i - h + 1];
      const long double ends = 0.5L * (values[i - h] + values[i + h]);
      trend[i] = static_cast<double>((inner + ends) / static_cast<long double>(period));
    } else {
      trend[i] = static_cast<double>((prefix[i + h + 1] - prefix[i - h]) /
                                     static_cast<long double>(span));
    }
  }
  for (std::size_t i = 0; i < h; ++i) trend[i] = trend[h];
  for (std::size_t i = n - h; i < n; ++i) trend[i] = trend[n - h - 1];
  return trend;
}

namespace {

// Moving average whose kernel is multiplied by the robustness weights. A
// window with no weight left falls back to the plain average.
std::vector<double> weighted_moving_average(std::span<const double> values,
                                            std::span<const double> weights,
                                            std::size_t period, std::size_t window) {
  const TrendFilter f = resolve_trend_filter(period, window);
  const std::size_t n = values.size();
  const std::vector<double> plain = centered_moving_average(values, period, window);
  std::vector<long double> wy(n + 1, 0.0L);
  std::vector<long double> w(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) {
    wy[i + 1] = wy[i] + static_cast<long double>(weights[i]) * values[i];
    w[i + 1] = w[i] + weights[i];
  }

  std::vector<double> trend(n);
  const std::size_t h = f.half_width;
  for (std::size_t i = h; i + h < n; ++i) {
    long double num = 0.0L;
    long double den = 0.0L;
    if (f.half_weighted_ends) {
      num = wy[i + h] - wy[i - h + 1] +
            0.5L * (static_cast<long double>(weights[i - h]) * values[i - h] +
                    static_cast<long double>(weights[i + h]) * values[i + h]);
      den = w[i + h] - w[i - h + 1] + 0.5L * (weights[i - h] + weights[i + h]);
    } else {
      num = wy[i + h + 1] - wy[i - h];
      den = w[i + h + 1] - w[i - h];
    }
    trend[i] = den > 1e-12L ? static_cast<double>(num / den) : plain[i];
  }
  for (std::size_t i = 0; i < h; ++i) trend[i] = trend[h];
  for (std::size_t i = n - h; i < n; ++i) trend[i] = trend[n - h - 1];
  return trend;
}

}  // namespace

Decomposition classical_decompose(const TimeSeries& series, std::size_t period) {
  check_decomposable(series, period);
  const auto x = series.values();
  const std::size_t n = x.size();
  const std::size_t h = period / 2;

  Decomposition d;
  d.trend = centered_moving_average(x, period);

  std::vector<double> sums(period, 0.0);
  std::vector<std::size_t> counts(period, 0);
  for (std::size_t i = h; i + h < n; ++i) {
    sums[i % period] += x[i] - d.trend[i];
    ++counts[i % period];
  }
  std::vector<double> pattern(period);
  for (std::size_t p = 0; p < period; ++p) pattern[p] = sums[p] / static_cast<double>(counts[p]);
  const double center =
      std::accumulate(pattern.begin(), pattern.end(), 0.0) / static_cast<double>(period);
  for (double& s : pattern) s -= center;

  d.seasonal.resize(n);
  d.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.seasonal[i] = pattern[i % period];
    d.residual[i] = x[i] - d.trend[i] - d.seasonal[i];
  }
  d.series_median = median(x);
  d.weights.assign(n, 1.0);
  return d;
}

Decomposition stl_decompose(const TimeSeries& series, const StlConfig& config) {
  const std::size_t period = config.period;
  check_decomposable(series, period);
  if (config.inner_iterations == 0) throw DecompError("inner_iterations must be positive");
  if (!(config.seasonal_span > 0.0 && config.seasonal_span <= 1.0)) {
    throw DecompError(fmt::format("seasonal span must be in (0, 1], got {}",
                                  config.seasonal_span));
  }
  resolve_trend_filter(period, config.trend_window);

  const auto x = series.values();
  const std::size_t n = x.size();
  const double tolerance = config.convergence_epsilon * value_range(x);

  std::vector<double> weights(n, 1.0);
  std::vector<double> seasonal(n, 0.0);
  std::vector<double> trend(n, 0.0);
  std::vector<double> residual(n, 0.0);
  std::vector<double> work(n);

  for (unsigned outer = 0; outer <= config.outer_iterations; ++outer) {
    for (unsigned inner = 0; inner < config.inner_iterations; ++inner) {
      for (std::size_t i = 0; i < n; ++i) work[i] = x[i] - seasonal[i];
      auto new_trend = outer == 0
                           ? centered_moving_average(work, period, config.trend_window)
                           : weighted_moving_average(work, weights, period, config.trend_window);
      for (std::size_t i = 0; i < n; ++i) work[i] = x[i] - new_trend[i];
      auto new_seasonal = subcycle_seasonal(work, period, config.seasonal_span,
                                            config.seasonal_degree, weights);
      center_per_cycle(new_seasonal, period);

      const bool first = outer == 0 && inner == 0;
      const double change = first ? 0.0
                                  : std::max(max_abs_diff(new_trend, trend),
                                             max_abs_diff(new_seasonal, seasonal));
      trend = std::move(new_trend);
      seasonal = std::move(new_seasonal);
      if (!first && change <= tolerance) break;
    }
    for (std::size_t i = 0; i < n; ++i) residual[i] = x[i] - trend[i] - seasonal[i];
    if (outer < config.outer_iterations) weights = robustness_weights(residual);
  }

  Decomposition d;
  d.seasonal = std::move(seasonal);
  d.trend = std::move(trend);
  d.residual = std::move(residual);
  d.series_median = median(x);
  d.variant = ResidualVariant::classic;
  d.weights = std::move(weights);
  return d;
}

Decomposition median_residual(const TimeSeries& series, Decomposition decomposition) {
  const auto x = series.values();
  if (decomposition.seasonal.size() != x.size()) {
    throw DecompError(fmt::format("decomposition of length {} does not match series of length {}",
                                  decomposition.seasonal.size(), x.size()));
  }
  if (x.empty()) throw DecompError("empty series");
  const double med = median(x);
  decomposition.series_median = med;
  decomposition.residual.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    decomposition.residual[i] = x[i] - decomposition.seasonal[i] - med;
  }
  decomposition.variant = ResidualVariant::median;
  return decomposition;
}

}  // namespace anomaly
