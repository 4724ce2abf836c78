#include "anomaly/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "anomaly/errors.hpp"
#include "anomaly/student_t.hpp"

namespace anomaly {

namespace {

bool direction_allows(Direction wanted, double deviation) {
  switch (wanted) {
    case Direction::positive:
      return deviation > 0.0;
    case Direction::negative:
      return deviation < 0.0;
    case Direction::both:
      return true;
  }
  return true;
}

AnomalyReport finish_report(const TimeSeries& series, const DetectorConfig& config,
                            std::size_t period, std::vector<Anomaly> anomalies) {
  std::sort(anomalies.begin(), anomalies.end(),
            [](const Anomaly& a, const Anomaly& b) { return a.index < b.index; });
  AnomalyReport report;
  report.anomalies = std::move(anomalies);
  report.config = config;
  report.series_length = series.size();
  report.period = period;
  report.percent_anomalous =
      series.empty() ? 0.0
                     : 100.0 * static_cast<double>(report.anomalies.size()) /
                           static_cast<double>(series.size());
  if (config.threshold) {
    report = apply_threshold(std::move(report), *config.threshold, config.threshold_mode);
  }
  return report;
}

Anomaly make_anomaly(const TimeSeries& series, std::size_t index, double score,
                     double deviation) {
  return {index, series.timestamps()[index], series[index], score, deviation};
}

std::size_t resolve_cap(const DetectorConfig& config, std::size_t n) {
  const std::size_t cap = max_anomaly_count(config.max_anoms, n);
  if (static_cast<double>(n) * config.max_anoms < 1.0 - 1e-9) {
    throw ConfigError(fmt::format("max_anoms {} allows no anomalies in a series of length {}",
                                  config.max_anoms, n));
  }
  return cap;
}

// Number of outliers: the largest j with statistic j above its critical
// value. Critical values fall as j grows, so the last one bounds the rest
// from below and most steps never need a t quantile.
std::size_t significant_steps(std::span<const EsdOutlier> steps, std::size_t n, double alpha) {
  if (steps.empty()) return 0;
  const double floor = esd_critical_value(n, steps.size(), alpha);
  for (std::size_t j = steps.size(); j >= 1; --j) {
    const double stat = steps[j - 1].statistic;
    if (stat > floor && stat > esd_critical_value(n, j, alpha)) return j;
  }
  return 0;
}

struct Entry {
  double value;
  std::size_t index;
};

// Classical variant. Moments of the remaining sample are kept as running
// sums about a reference point; the extremes come from two lazy heaps.
std::vector<EsdOutlier> esd_classical(std::span<const double> values, const EsdOptions& opt) {
  const std::size_t n = values.size();
  std::vector<bool> removed(n, false);

  long double shift = 0.0L;
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  long double sum_sq_ref = 0.0L;
  auto rebase = [&] {
    long double total = 0.0L;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!removed[i]) {
        total += values[i];
        ++count;
      }
    }
    shift = total / static_cast<long double>(count);
    sum = 0.0L;
    sum_sq = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      if (removed[i]) continue;
      const long double d = values[i] - shift;
      sum += d;
      sum_sq += d * d;
    }
    sum_sq_ref = sum_sq;
  };
  rebase();

  std::vector<Entry> top(n);
  for (std::size_t i = 0; i < n; ++i) top[i] = {values[i], i};
  std::vector<Entry> bottom = top;
  // Heap tops: largest (smallest) value, lowest index among equals.
  const auto max_order = [](const Entry& a, const Entry& b) {
    return a.value < b.value || (a.value == b.value && a.index > b.index);
  };
  const auto min_order = [](const Entry& a, const Entry& b) {
    return a.value > b.value || (a.value == b.value && a.index > b.index);
  };
  std::make_heap(top.begin(), top.end(), max_order);
  std::make_heap(bottom.begin(), bottom.end(), min_order);
  const auto settle = [&](std::vector<Entry>& heap, auto order) {
    while (removed[heap.front().index]) {
      std::pop_heap(heap.begin(), heap.end(), order);
      heap.pop_back();
    }
  };

  std::vector<EsdOutlier> removed_points;
  removed_points.reserve(opt.max_outliers);
  for (std::size_t j = 1; j <= opt.max_outliers; ++j) {
    const auto m = static_cast<long double>(n - j + 1);
    // Running sums lose digits once most of the spread has been removed.
    if (sum_sq - sum * sum / m < 1e-8L * sum_sq_ref) rebase();
    const long double centered = sum_sq - sum * sum / m;
    const double mean = static_cast<double>(shift + sum / m);
    const double sd =
        std::sqrt(static_cast<double>(std::max(centered, 0.0L) / (m - 1.0L)));
    if (!(sd > opt.min_dispersion)) break;

    settle(top, max_order);
    settle(bottom, min_order);
    const Entry hi = top.front();
    const Entry lo = bottom.front();
    const double dev_hi = hi.value - mean;
    const double dev_lo = mean - lo.value;
    const bool take_hi = dev_hi > dev_lo || (dev_hi == dev_lo && hi.index < lo.index);
    const Entry pick = take_hi ? hi : lo;
    if (take_hi) {
      std::pop_heap(top.begin(), top.end(), max_order);
      top.pop_back();
    } else {
      std::pop_heap(bottom.begin(), bottom.end(), min_order);
      bottom.pop_back();
    }

    const double deviation = pick.value - mean;
    const double stat = std::fabs(deviation) / sd;
    removed_points.push_back({pick.index, stat, deviation});

    removed[pick.index] = true;
    const long double d = pick.value - shift;
    sum -= d;
    sum_sq -= d * d;
  }
  return removed_points;
}

// k-th smallest (0-based) of the union of two ascending sequences.
template <typename A, typename B>
double kth_of_two(A a, std::size_t na, B b, std::size_t nb, std::size_t k) {
  std::size_t lo = k + 1 > nb ? k + 1 - nb : 0;
  std::size_t hi = std::min(k + 1, na);
  while (lo < hi) {
    const std::size_t i = lo + (hi - lo) / 2;
    const std::size_t j = k + 1 - i;
    if (j > 0 && b(j - 1) > a(i)) {
      lo = i + 1;
    } else {
      hi = i;
    }
  }
  const std::size_t j = k + 1 - lo;
  double best = -std::numeric_limits<double>::infinity();
  if (lo > 0) best = std::max(best, a(lo - 1));
  if (j > 0) best = std::max(best, b(j - 1));
  return best;
}

// Robust variant. Removed points are always extremes, so the remaining
// sample is a contiguous range of the sorted values. The MAD is a rank
// query over the distances below and above the median, both ascending.
std::vector<EsdOutlier> esd_hybrid(std::span<const double> values, const EsdOptions& opt) {
  const std::size_t n = values.size();
  std::vector<Entry> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = {values[i], i};
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    return a.value < b.value || (a.value == b.value && a.index < b.index);
  });
  const auto by_value = [](const Entry& e, double v) { return e.value < v; };

  std::size_t first = 0;
  std::size_t last = n;
  std::vector<EsdOutlier> removed;
  removed.reserve(opt.max_outliers);
  for (std::size_t j = 1; j <= opt.max_outliers; ++j) {
    const std::size_t m = last - first;
    const std::size_t mid = first + m / 2;
    const double med = m % 2 == 1 ? sorted[mid].value
                                   : sorted[mid - 1].value +
                                         (sorted[mid].value - sorted[mid - 1].value) / 2.0;

    const std::size_t split = static_cast<std::size_t>(
        std::lower_bound(sorted.begin() + static_cast<std::ptrdiff_t>(first),
                         sorted.begin() + static_cast<std::ptrdiff_t>(last), med, by_value) -
        sorted.begin());
    const auto below = [&](std::size_t t) { return med - sorted[split - 1 - t].value; };
    const auto above = [&](std::size_t t) { return sorted[split + t].value - med; };
    const std::size_t n_below = split - first;
    const std::size_t n_above = last - split;
    double mad_value = kth_of_two(below, n_below, above, n_above, m / 2);
    if (m % 2 == 0) {
      const double lower = kth_of_two(below, n_below, above, n_above, m / 2 - 1);
      mad_value = lower + (mad_value - lower) / 2.0;
    }
    const double disp = opt.mad_scale * mad_value;
    if (!(disp > opt.min_dispersion)) break;

    // Lowest index among the maximal values starts their run.
    const std::size_t run = static_cast<std::size_t>(
        std::lower_bound(sorted.begin() + static_cast<std::ptrdiff_t>(first),
                         sorted.begin() + static_cast<std::ptrdiff_t>(last),
                         sorted[last - 1].value, by_value) -
        sorted.begin());
    const double dev_lo = med - sorted[first].value;
    const double dev_hi = sorted[run].value - med;
    const bool take_lo =
        dev_lo > dev_hi || (dev_lo == dev_hi && sorted[first].index < sorted[run].index);

    Entry pick;
    if (take_lo) {
      pick = sorted[first++];
    } else {
      pick = sorted[run];
      std::rotate(sorted.begin() + static_cast<std::ptrdiff_t>(run),
                  sorted.begin() + static_cast<std::ptrdiff_t>(run + 1),
                  sorted.begin() + static_cast<std::ptrdiff_t>(last));
      --last;
    }

    const double deviation = pick.value - med;
    const double stat = std::fabs(deviation) / disp;
    removed.push_back({pick.index, stat, deviation});
  }
  return removed;
}

std::size_t resolve_period(const TimeSeries& series, const DetectorConfig& config) {
  const std::size_t period =
      infer_period(series, config.period ? config.period : series.period());
  if (period < 2) throw PeriodError(fmt::format("period must be at least 2, got {}", period));
  if (series.size() < 2 * period) {
    throw DecompError(fmt::format("series of length {} is shorter than two periods of {}",
                                  series.size(), period));
  }
  return period;
}

AnomalyReport seasonal_esd(const TimeSeries& series, const DetectorConfig& config, bool hybrid) {
  validate(config);
  const std::size_t n = series.size();
  const std::size_t period = resolve_period(series, config);
  const std::size_t cap = resolve_cap(config, n);

  StlConfig stl = config.stl;
  stl.period = period;
  const Decomposition d = median_residual(series, stl_decompose(series, stl));

  double scale = 0.0;
  for (double v : series.values()) scale = std::max(scale, std::fabs(v));

  EsdOptions opt;
  opt.alpha = config.alpha;
  opt.max_outliers = cap;
  opt.hybrid = hybrid;
  opt.mad_scale = config.mad_scale;
  opt.direction = config.direction;
  // Residuals at rounding-noise level carry no signal.
  opt.min_dispersion = 1e-10 * scale;

  std::vector<Anomaly> anomalies;
  for (const EsdOutlier& o : esd(d.residual, opt)) {
    anomalies.push_back(make_anomaly(series, o.index, o.statistic, o.deviation));
  }
  return finish_report(series, config, period, std::move(anomalies));
}

}  // namespace

void validate(const DetectorConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw ConfigError(fmt::format("alpha must be in (0, 1), got {}", config.alpha));
  }
  if (!(config.max_anoms > 0.0 && config.max_anoms <= 0.49)) {
    throw ConfigError(fmt::format("max_anoms must be in (0, 0.49], got {}", config.max_anoms));
  }
  if (!(config.mad_scale > 0.0) || !std::isfinite(config.mad_scale)) {
    throw ConfigError(fmt::format("mad_scale must be positive, got {}", config.mad_scale));
  }
  if (config.threshold && !std::isfinite(*config.threshold)) {
    throw ConfigError("threshold must be finite");
  }
  if (config.period && *config.period < 2) {
    throw ConfigError(fmt::format("period must be at least 2, got {}", *config.period));
  }
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::three_sigma:
      return "three-sigma";
    case Algorithm::grubbs:
      return "grubbs";
    case Algorithm::esd:
      return "esd";
    case Algorithm::s_esd:
      return "s-esd";
    case Algorithm::s_h_esd:
      return "s-h-esd";
  }
  return "unknown";
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::positive:
      return "pos";
    case Direction::negative:
      return "neg";
    case Direction::both:
      return "both";
  }
  return "unknown";
}

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::above_value ? "value" : "deviation";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::three_sigma, Algorithm::grubbs, Algorithm::esd,
                      Algorithm::s_esd, Algorithm::s_h_esd}) {
    if (name == to_string(a)) return a;
  }
  if (name == "three_sigma") return Algorithm::three_sigma;
  if (name == "s_esd") return Algorithm::s_esd;
  if (name == "s_h_esd") return Algorithm::s_h_esd;
  throw ConfigError(fmt::format("unknown algorithm '{}'", name));
}

Direction parse_direction(std::string_view name) {
  if (name == "pos" || name == "positive") return Direction::positive;
  if (name == "neg" || name == "negative") return Direction::negative;
  if (name == "both") return Direction::both;
  throw ConfigError(fmt::format("unknown direction '{}'", name));
}

ThresholdMode parse_threshold_mode(std::string_view name) {
  if (name == "value" || name == "above_value") return ThresholdMode::above_value;
  if (name == "deviation" || name == "above_deviation") return ThresholdMode::above_deviation;
  throw ConfigError(fmt::format("unknown threshold mode '{}'", name));
}

std::vector<std::size_t> AnomalyReport::indices() const {
  std::vector<std::size_t> out;
  out.reserve(anomalies.size());
  for (const Anomaly& a : anomalies) out.push_back(a.index);
  return out;
}

std::size_t max_anomaly_count(double max_anoms, std::size_t n) {
  const double raw = max_anoms * static_cast<double>(n);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(raw - 1e-9)));
}

double esd_critical_value(std::size_t n, std::size_t j, double alpha) {
  if (j == 0 || j + 2 > n) {
    throw ConfigError(fmt::format("ESD step {} undefined for a sample of {}", j, n));
  }
  const auto remaining = static_cast<double>(n - j + 1);
  const auto df = static_cast<double>(n - j - 1);
  const double t = t_quantile(1.0 - alpha / (2.0 * remaining), df);
  return static_cast<double>(n - j) * t / std::sqrt((df + t * t) * remaining);
}

double grubbs_critical_value(std::size_t n, double alpha) {
  if (n < 3) throw StatError(fmt::format("Grubbs test needs n >= 3, got {}", n));
  const auto nd = static_cast<double>(n);
  const double t = t_quantile(1.0 - alpha / (2.0 * nd), nd - 2.0);
  return (nd - 1.0) / std::sqrt(nd) * std::sqrt(t * t / (nd - 2.0 + t * t));
}

std::vector<EsdOutlier> esd(std::span<const double> values, const EsdOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw ConfigError(fmt::format("alpha must be in (0, 1), got {}", options.alpha));
  }
  if (options.max_outliers == 0) return {};
  if (options.max_outliers + 2 >= values.size()) {
    throw ConfigError(fmt::format("k_max {} must be below n - 2 for n = {}",
                                  options.max_outliers, values.size()));
  }
  auto found = options.hybrid ? esd_hybrid(values, options) : esd_classical(values, options);
  found.resize(significant_steps(found, values.size(), options.alpha));
  std::erase_if(found, [&](const EsdOutlier& o) {
    return !direction_allows(options.direction, o.deviation);
  });
  return found;
}

AnomalyReport three_sigma(const TimeSeries& series, const DetectorConfig& config) {
  validate(config);
  const std::size_t n = series.size();
  if (n < 2) throw StatError("three-sigma needs at least 2 values");
  const std::size_t cap = resolve_cap(config, n);
  const MeanStd ms = mean_std(series.values());
  std::vector<Anomaly> anomalies;
  if (ms.sample_std > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = series[i] - ms.mean;
      if (std::fabs(d) > 3.0 * ms.sample_std && direction_allows(config.direction, d)) {
        anomalies.push_back(make_anomaly(series, i, std::fabs(d) / ms.sample_std, d));
      }
    }
  }
  if (anomalies.size() > cap) {
    std::stable_sort(anomalies.begin(), anomalies.end(),
                     [](const Anomaly& a, const Anomaly& b) { return a.score > b.score; });
    anomalies.resize(cap);
  }
  return finish_report(series, config, 0, std::move(anomalies));
}

AnomalyReport grubbs(const TimeSeries& series, const DetectorConfig& config) {
  validate(config);
  const std::size_t n = series.size();
  if (n < 3) throw StatError(fmt::format("Grubbs test needs n >= 3, got {}", n));
  resolve_cap(config, n);
  const MeanStd ms = mean_std(series.values());
  std::vector<Anomaly> anomalies;
  if (ms.sample_std > 0.0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::fabs(series[i] - ms.mean) > std::fabs(series[best] - ms.mean)) best = i;
    }
    const double d = series[best] - ms.mean;
    const double g = std::fabs(d) / ms.sample_std;
    if (g > grubbs_critical_value(n, config.alpha) && direction_allows(config.direction, d)) {
      anomalies.push_back(make_anomaly(series, best, g, d));
    }
  }
  return finish_report(series, config, 0, std::move(anomalies));
}

AnomalyReport generalized_esd(const TimeSeries& series, const DetectorConfig& config) {
  validate(config);
  EsdOptions opt;
  opt.alpha = config.alpha;
  opt.max_outliers = resolve_cap(config, series.size());
  opt.hybrid = false;
  opt.mad_scale = config.mad_scale;
  opt.direction = config.direction;
  std::vector<Anomaly> anomalies;
  for (const EsdOutlier& o : esd(series.values(), opt)) {
    anomalies.push_back(make_anomaly(series, o.index, o.statistic, o.deviation));
  }
  return finish_report(series, config, 0, std::move(anomalies));
}

AnomalyReport s_esd(const TimeSeries& series, const DetectorConfig& config) {
  return seasonal_esd(series, config, false);
}

AnomalyReport s_h_esd(const TimeSeries& series, const DetectorConfig& config) {
  return seasonal_esd(series, config, true);
}

AnomalyReport detect(const TimeSeries& series, const DetectorConfig& config) {
  switch (config.algorithm) {
    case Algorithm::three_sigma:
      return three_sigma(series, config);
    case Algorithm::grubbs:
      return grubbs(series, config);
    case Algorithm::esd:
      return generalized_esd(series, config);
    case Algorithm::s_esd:
      return s_esd(series, config);
    case Algorithm::s_h_esd:
      return s_h_esd(series, config);
  }
  throw ConfigError("unknown algorithm");
}

AnomalyReport apply_threshold(AnomalyReport report, double threshold, ThresholdMode mode) {
  std::erase_if(report.anomalies, [&](const Anomaly& a) {
    const double magnitude = mode == ThresholdMode::above_value ? a.value : std::fabs(a.deviation);
    return !(magnitude > threshold);
  });
  if (report.series_length > 0) {
    report.percent_anomalous = 100.0 * static_cast<double>(report.anomalies.size()) /
                               static_cast<double>(report.series_length);
  }
  return report;
}

}  // namespace anomaly
