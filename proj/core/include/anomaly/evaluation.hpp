#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "anomaly/detectors.hpp"
#include "anomaly/series.hpp"

namespace anomaly {

struct EvalMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_beta = 0.0;
  double beta = 1.0;
};

/// (1 + b^2) p r / (b^2 p + r), or 0 when p + r = 0. beta = 0 gives p.
double f_beta(double precision, double recall, double beta);

/// Precision is 1 for an empty truth set with no detections and 0 for
/// detections without truth; recall with no truth is 1.
EvalMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double beta,
                                bool truth_empty);

/// Matches detections to truth indices within +-tolerance. Pairs are taken
/// greedily by distance, then truth index, then detected index; each truth
/// index matches at most once. Duplicate indices are ignored.
EvalMetrics score(std::span<const std::size_t> detected, std::span<const std::size_t> truth,
                  std::size_t n, double beta = 1.0, std::size_t tolerance = 0);

/// Least-squares cubic B-spline with uniform knots about `knot_spacing`
/// samples apart; the first and last samples sit on knots.
/// Throws EvalError unless the series holds at least four knot spans.
TimeSeries bspline_smooth(const TimeSeries& series, std::size_t knot_spacing);

struct InjectionSpec {
  std::size_t count = 0;
  /// Magnitude range in units of the residual standard deviation.
  double magnitude_min = 8.0;
  double magnitude_max = 12.0;
  std::size_t width_min = 1;
  std::size_t width_max = 1;
  /// Probability that an injected interval is shifted upwards.
  double positive_fraction = 1.0;
  std::uint64_t seed = 0;
  /// Minimum number of untouched samples between two intervals.
  std::size_t min_gap = 1;
};

/// Throws EvalError on empty ranges or when the intervals cannot fit.
void validate(const InjectionSpec& spec, std::size_t n);

/// Adds +-m * sigma over randomly placed, non-overlapping intervals of the
/// baseline. Labels mark exactly the shifted samples.
LabeledSeries inject(const TimeSeries& baseline, const InjectionSpec& spec, double sigma);

/// As above with sigma the sample standard deviation of raw - baseline.
LabeledSeries inject(const TimeSeries& raw, const TimeSeries& baseline, const InjectionSpec& spec);

struct SeasonalSpec {
  std::size_t period = 24;
  std::size_t cycles = 14;
  double amplitude = 10.0;
  double trend_slope = 0.0;
  double noise_sigma = 1.0;
  /// Harmonics per cycle; harmonic k has amplitude / k.
  std::size_t modes = 1;
  /// Phase of each harmonic in radians; missing entries are 0.
  std::vector<double> phases;
  std::uint64_t seed = 0;
  Timestamp start = 1388534400;
  Timestamp cadence = 3600;
};

/// Sum of harmonics plus a linear trend and Gaussian noise. The result
/// carries `period`.
TimeSeries generate_seasonal(const SeasonalSpec& spec);

struct NamedSeries {
  std::string name;
  TimeSeries series;
};

struct NamedDetector {
  std::string name;
  DetectorConfig config;
};

struct CorpusOptions {
  double beta = 1.0;
  std::size_t tolerance = 0;
  /// Samples per spline knot; 0 uses period / 8 (at least 2).
  std::size_t knot_spacing = 0;
  unsigned jobs = 1;
};

struct CorpusRow {
  std::string series;
  std::string detector;
  EvalMetrics metrics;
};

/// For each series: smooth, inject (seeded by spec.seed and the series
/// position), run every detector and score it. Rows are ordered by series,
/// then detector, followed by one aggregate row per detector.
std::vector<CorpusRow> run_corpus(std::span<const NamedSeries> corpus,
                                  std::span<const NamedDetector> detectors,
                                  const InjectionSpec& spec, const CorpusOptions& options = {});

inline constexpr const char* kAggregateRowName = "ALL";

/// One row per detector named kAggregateRowName: counts summed, precision,
/// recall and F averaged over series.
std::vector<CorpusRow> aggregate(std::span<const CorpusRow> rows);

/// `series,detector,tp,fp,fn,precision,recall,f_beta`
void write_results_csv(std::ostream& out, std::span<const CorpusRow> rows);

}  // namespace anomaly
