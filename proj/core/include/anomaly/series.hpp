#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anomaly {

/// Epoch seconds.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

/// A regularly sampled, immutable (timestamp, value) sequence.
///
/// Construction validates that timestamps are strictly increasing with a
/// single fixed cadence and that every value is finite. The optional period
/// is the number of samples per seasonal cycle.
class TimeSeries {
 public:
  TimeSeries() = default;

  /// Throws IngestError when the invariants above do not hold.
  TimeSeries(std::vector<Timestamp> timestamps, std::vector<double> values,
             std::optional<std::size_t> period = std::nullopt);

  /// Series starting at `start` with one sample every `cadence` seconds.
  static TimeSeries regular(Timestamp start, Timestamp cadence,
                            std::vector<double> values,
                            std::optional<std::size_t> period = std::nullopt);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Seconds between consecutive samples; 0 for series shorter than two.
  Timestamp cadence() const noexcept { return cadence_; }
  std::optional<std::size_t> period() const noexcept { return period_; }

  TimeSeries with_period(std::optional<std::size_t> period) const;
  /// Same timestamps, new values (length must match).
  TimeSeries with_values(std::vector<double> values) const;
  /// The trailing `count` samples (the whole series if shorter).
  TimeSeries tail(std::size_t count) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<Timestamp> timestamps_;
  std::vector<double> values_;
  Timestamp cadence_ = 0;
  std::optional<std::size_t> period_;
};

/// A series plus one ground-truth anomaly flag per sample.
struct LabeledSeries {
  LabeledSeries() = default;
  LabeledSeries(TimeSeries series, std::vector<bool> labels);

  TimeSeries series;
  std::vector<bool> labels;

  /// Positions whose label is set, ascending.
  std::vector<std::size_t> anomaly_indices() const;
};

/// Column mapping and gap policy for load_csv().
struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string value_column = "value";
  /// Fill gaps of whole multiples of the cadence by linear interpolation.
  bool repair_gaps = false;
  /// Largest number of consecutive missing samples repair will fill.
  std::size_t max_gap = 10;
};

/// Per-point anomaly flags and scores emitted as extra CSV columns.
struct PointFlags {
  std::vector<bool> anomaly;
  std::vector<double> score;
};

/// Parses epoch seconds ("1400000000") or ISO-8601
/// ("2014-05-13", "2014-05-13T16:53:20Z", "2014-05-13 16:53:20+02:00").
Timestamp parse_timestamp(std::string_view text);

/// Formats epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp ts);

TimeSeries read_csv(std::istream& in, const CsvSchema& schema = {});
TimeSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Header `timestamp,value`, or `timestamp,value,anomaly,score` with flags.
/// Values use the shortest representation that parses back to the same double.
void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv(std::ostream& out, const TimeSeries& series, const PointFlags& flags);
void write_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_csv(const std::filesystem::path& path, const TimeSeries& series,
               const PointFlags& flags);

/// Samples per seasonal cycle: the hint when given, otherwise a daily cycle
/// for minute (1440) or hourly (24) cadence. Throws PeriodError otherwise.
std::size_t infer_period(const TimeSeries& series,
                         std::optional<std::size_t> hint = std::nullopt);

/// Labels file: `timestamp,label` with label in {0,1}.
std::vector<bool> read_labels(std::istream& in, const TimeSeries& series);
std::vector<bool> load_labels(const std::filesystem::path& path, const TimeSeries& series);
void write_labels(std::ostream& out, const LabeledSeries& labeled);
void write_labels(const std::filesystem::path& path, const LabeledSeries& labeled);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace anomaly
