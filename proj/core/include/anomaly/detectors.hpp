#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anomaly/decomposition.hpp"
#include "anomaly/robust_stats.hpp"
#include "anomaly/series.hpp"

namespace anomaly {

enum class Algorithm { three_sigma, grubbs, esd, s_esd, s_h_esd };
enum class Direction { positive, negative, both };
enum class ThresholdMode {
  above_value,      // keep anomalies whose raw value exceeds the threshold
  above_deviation,  // keep anomalies whose |deviation| exceeds the threshold
};

struct DetectorConfig {
  Algorithm algorithm = Algorithm::s_h_esd;
  double alpha = 0.05;
  /// Upper bound on the flagged fraction; k_max = ceil(max_anoms * n).
  double max_anoms = 0.10;
  Direction direction = Direction::both;
  std::optional<std::size_t> period;
  std::optional<double> threshold;
  ThresholdMode threshold_mode = ThresholdMode::above_value;
  double mad_scale = kMadConsistencyScale;
  /// Decomposition knobs for the seasonal detectors; `period` is ignored.
  StlConfig stl{};
};

/// Throws ConfigError on out-of-range fields.
void validate(const DetectorConfig& config);

std::string_view to_string(Algorithm algorithm);
std::string_view to_string(Direction direction);
std::string_view to_string(ThresholdMode mode);
Algorithm parse_algorithm(std::string_view name);
Direction parse_direction(std::string_view name);
ThresholdMode parse_threshold_mode(std::string_view name);

struct Anomaly {
  std::size_t index = 0;
  Timestamp timestamp = 0;
  double value = 0.0;
  /// Test statistic when the point was flagged.
  double score = 0.0;
  /// Signed distance from the location estimate, in the units of the tested
  /// sequence (the residual for seasonal detectors).
  double deviation = 0.0;

  Direction direction() const noexcept {
    return deviation >= 0.0 ? Direction::positive : Direction::negative;
  }
};

struct AnomalyReport {
  std::vector<Anomaly> anomalies;  // ascending index
  DetectorConfig config;
  std::size_t series_length = 0;
  std::size_t period = 0;  // 0 for non-seasonal detectors
  double percent_anomalous = 0.0;

  std::vector<std::size_t> indices() const;
  bool empty() const noexcept { return anomalies.empty(); }
};

/// ceil(max_anoms * n) with a guard against floating-point overshoot.
std::size_t max_anomaly_count(double max_anoms, std::size_t n);

struct EsdOptions {
  double alpha = 0.05;
  std::size_t max_outliers = 1;
  /// Median and mad_scale * MAD in place of mean and sample std.
  bool hybrid = false;
  double mad_scale = kMadConsistencyScale;
  Direction direction = Direction::both;
  /// Dispersion at or below this ends the test early.
  double min_dispersion = 0.0;
};

struct EsdOutlier {
  std::size_t index = 0;
  double statistic = 0.0;
  double deviation = 0.0;
};

/// Generalized ESD. Returns the flagged points in removal order.
std::vector<EsdOutlier> esd(std::span<const double> values, const EsdOptions& options);

/// Critical value for the j-th ESD step (1-based) in a sample of n.
double esd_critical_value(std::size_t n, std::size_t j, double alpha);

/// Two-sided Grubbs critical value.
double grubbs_critical_value(std::size_t n, double alpha);

AnomalyReport three_sigma(const TimeSeries& series, const DetectorConfig& config = {});
AnomalyReport grubbs(const TimeSeries& series, const DetectorConfig& config = {});
/// Generalized ESD on the raw values (no decomposition).
AnomalyReport generalized_esd(const TimeSeries& series, const DetectorConfig& config = {});
AnomalyReport s_esd(const TimeSeries& series, const DetectorConfig& config = {});
AnomalyReport s_h_esd(const TimeSeries& series, const DetectorConfig& config = {});

/// Dispatches on config.algorithm.
AnomalyReport detect(const TimeSeries& series, const DetectorConfig& config);

/// Keeps anomalies strictly above the threshold (raw value or |deviation|).
AnomalyReport apply_threshold(AnomalyReport report, double threshold, ThresholdMode mode);

}  // namespace anomaly
