#include "anomaly/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "anomaly/errors.hpp"

namespace anomaly {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

Civil civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {m <= 2 ? y + 1 : y, m, d};
}

// Reads exactly `width` digits starting at pos.
bool read_digits(std::string_view s, std::size_t& pos, std::size_t width, unsigned& out) {
  if (pos + width > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  pos += width;
  out = v;
  return true;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw IngestError(fmt::format("unparsable timestamp '{}'", text));
}

Timestamp parse_iso8601(std::string_view s) {
  std::size_t pos = 0;
  unsigned year = 0, month = 0, day = 0;
  if (!read_digits(s, pos, 4, year) || pos >= s.size() || s[pos++] != '-' ||
      !read_digits(s, pos, 2, month) || pos >= s.size() || s[pos++] != '-' ||
      !read_digits(s, pos, 2, day)) {
    bad_timestamp(s);
  }
  if (month < 1 || month > 12 || day < 1 || day > 31) bad_timestamp(s);

  unsigned hour = 0, minute = 0, second = 0;
  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') bad_timestamp(s);
    ++pos;
    if (!read_digits(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':' ||
        !read_digits(s, pos, 2, minute)) {
      bad_timestamp(s);
    }
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!read_digits(s, pos, 2, second)) bad_timestamp(s);
      if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        // Sub-second precision is not representable; only zero fractions pass.
        std::size_t digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
          if (s[pos] != '0') bad_timestamp(s);
          ++pos;
          ++digits;
        }
        if (digits == 0) bad_timestamp(s);
      }
    }
    if (hour > 23 || minute > 59 || second > 60) bad_timestamp(s);
    if (pos < s.size()) {
      char zone = s[pos++];
      if (zone == 'Z' || zone == 'z') {
        if (pos != s.size()) bad_timestamp(s);
      } else if (zone == '+' || zone == '-') {
        unsigned oh = 0, om = 0;
        if (!read_digits(s, pos, 2, oh)) bad_timestamp(s);
        if (pos < s.size() && s[pos] == ':') ++pos;
        if (pos < s.size() && !read_digits(s, pos, 2, om)) bad_timestamp(s);
        if (pos != s.size() || oh > 23 || om > 59) bad_timestamp(s);
        offset = (zone == '+' ? 1 : -1) * static_cast<std::int64_t>(oh * 3600 + om * 60);
      } else {
        bad_timestamp(s);
      }
    }
  }
  const std::int64_t days = days_from_civil(year, month, day);
  return days * kSecondsPerDay + hour * 3600 + minute * 60 + second - offset;
}

double parse_value(std::string_view text) {
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw IngestError(fmt::format("unparsable value '{}'", text));
  }
  if (!std::isfinite(v)) throw IngestError(fmt::format("non-finite value '{}'", text));
  return v;
}

std::size_t find_column(const std::vector<std::string_view>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return header.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

TimeSeries::TimeSeries(std::vector<Timestamp> timestamps, std::vector<double> values,
                       std::optional<std::size_t> period)
    : timestamps_(std::move(timestamps)), values_(std::move(values)), period_(period) {
  if (timestamps_.size() != values_.size()) {
    throw IngestError(fmt::format("{} timestamps but {} values", timestamps_.size(),
                                  values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw IngestError(fmt::format("non-finite value at position {}", i));
    }
  }
  if (timestamps_.size() >= 2) {
    cadence_ = timestamps_[1] - timestamps_[0];
    if (cadence_ <= 0) throw IngestError("timestamps must be strictly increasing");
    for (std::size_t i = 2; i < timestamps_.size(); ++i) {
      const Timestamp step = timestamps_[i] - timestamps_[i - 1];
      if (step <= 0) throw IngestError("timestamps must be strictly increasing");
      if (step != cadence_) {
        throw IngestError(fmt::format("irregular cadence at position {}: {} s vs {} s", i,
                                      step, cadence_));
      }
    }
  }
  if (period_ && *period_ == 0) throw PeriodError("period must be positive");
}

TimeSeries TimeSeries::regular(Timestamp start, Timestamp cadence, std::vector<double> values,
                               std::optional<std::size_t> period) {
  if (cadence <= 0) throw IngestError("cadence must be positive");
  std::vector<Timestamp> ts(values.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ts[i] = start + static_cast<Timestamp>(i) * cadence;
  }
  TimeSeries series(std::move(ts), std::move(values), period);
  series.cadence_ = cadence;
  return series;
}

TimeSeries TimeSeries::with_period(std::optional<std::size_t> period) const {
  if (period && *period == 0) throw PeriodError("period must be positive");
  TimeSeries copy = *this;
  copy.period_ = period;
  return copy;
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) {
    throw IngestError(fmt::format("expected {} values, got {}", values_.size(), values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw IngestError("non-finite value");
  }
  TimeSeries copy;
  copy.timestamps_ = timestamps_;
  copy.values_ = std::move(values);
  copy.cadence_ = cadence_;
  copy.period_ = period_;
  return copy;
}

TimeSeries TimeSeries::tail(std::size_t count) const {
  if (count >= size()) return *this;
  const auto first = static_cast<std::ptrdiff_t>(size() - count);
  TimeSeries copy;
  copy.timestamps_.assign(timestamps_.begin() + first, timestamps_.end());
  copy.values_.assign(values_.begin() + first, values_.end());
  copy.cadence_ = count >= 2 ? cadence_ : 0;
  copy.period_ = period_;
  return copy;
}

LabeledSeries::LabeledSeries(TimeSeries s, std::vector<bool> l)
    : series(std::move(s)), labels(std::move(l)) {
  if (labels.size() != series.size()) {
    throw IngestError(fmt::format("{} labels for a series of length {}", labels.size(),
                                  series.size()));
  }
}

std::vector<std::size_t> LabeledSeries::anomaly_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) out.push_back(i);
  }
  return out;
}

Timestamp parse_timestamp(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) bad_timestamp(text);

  std::int64_t whole = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), whole);
  if (ec == std::errc() && ptr == s.data() + s.size()) return whole;

  // Epoch seconds written as a float ("1.4e9", "1400000000.0").
  const bool numeric = s.find_first_not_of("+-0123456789.eE") == std::string_view::npos;
  if (numeric && s.find('-', 1) == std::string_view::npos) {
    double v = 0.0;
    std::string_view d = s.front() == '+' ? s.substr(1) : s;
    auto [p2, ec2] = std::from_chars(d.data(), d.data() + d.size(), v);
    if (ec2 == std::errc() && p2 == d.data() + d.size() && std::isfinite(v) &&
        v == std::floor(v) && std::fabs(v) < 9.2e18) {
      return static_cast<Timestamp>(v);
    }
    bad_timestamp(text);
  }
  return parse_iso8601(s);
}

std::string format_iso8601(Timestamp ts) {
  std::int64_t days = ts / kSecondsPerDay;
  std::int64_t secs = ts % kSecondsPerDay;
  if (secs < 0) {
    secs += kSecondsPerDay;
    --days;
  }
  const Civil c = civil_from_days(days);
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", c.year, c.month, c.day,
                     secs / 3600, (secs / 60) % 60, secs % 60);
}

std::string format_double(double value) { return fmt::format("{}", value); }

TimeSeries read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) throw IngestError("empty CSV input");
  if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header_line.erase(0, 3);
  }
  header = split_fields(header_line);

  std::size_t ts_col = find_column(header, schema.timestamp_column);
  std::size_t val_col = find_column(header, schema.value_column);
  if (ts_col == header.size() || val_col == header.size()) {
    throw IngestError(fmt::format("CSV header must contain '{}' and '{}' columns",
                                  schema.timestamp_column, schema.value_column));
  }
  const std::size_t needed = std::max(ts_col, val_col) + 1;

  std::vector<std::pair<Timestamp, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() < needed) {
      throw IngestError(fmt::format("line {}: expected at least {} fields", line_no, needed));
    }
    try {
      rows.emplace_back(parse_timestamp(fields[ts_col]), parse_value(fields[val_col]));
    } catch (const IngestError& e) {
      throw IngestError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  if (rows.empty()) throw IngestError("CSV contains no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  Timestamp cadence = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Timestamp step = rows[i].first - rows[i - 1].first;
    if (step == 0) {
      throw IngestError(fmt::format("duplicate timestamp {}", rows[i].first));
    }
    cadence = cadence == 0 ? step : std::min(cadence, step);
  }

  std::vector<Timestamp> ts;
  std::vector<double> vals;
  ts.reserve(rows.size());
  vals.reserve(rows.size());
  ts.push_back(rows.front().first);
  vals.push_back(rows.front().second);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto [t0, v0] = rows[i - 1];
    const auto [t1, v1] = rows[i];
    const Timestamp step = t1 - t0;
    if (step % cadence != 0) {
      throw IngestError(fmt::format("irregular cadence between {} and {} (cadence {} s)", t0, t1,
                                    cadence));
    }
    const Timestamp k = step / cadence;
    if (k > 1) {
      const auto missing = static_cast<std::size_t>(k - 1);
      if (!schema.repair_gaps) {
        throw IngestError(fmt::format("gap of {} missing samples after {}", missing, t0));
      }
      if (missing > schema.max_gap) {
        throw IngestError(fmt::format("gap of {} missing samples after {} exceeds repair limit {}",
                                      missing, t0, schema.max_gap));
      }
      for (Timestamp m = 1; m < k; ++m) {
        const double frac = static_cast<double>(m) / static_cast<double>(k);
        ts.push_back(t0 + m * cadence);
        vals.push_back(v0 + (v1 - v0) * frac);
      }
    }
    ts.push_back(t1);
    vals.push_back(v1);
  }
  return TimeSeries(std::move(ts), std::move(vals));
}

TimeSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  auto in = open_input(path);
  return read_csv(in, schema);
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  out << "timestamp,value\n";
  const auto ts = series.timestamps();
  const auto vs = series.values();
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << ts[i] << ',' << format_double(vs[i]) << '\n';
  }
}

void write_csv(std::ostream& out, const TimeSeries& series, const PointFlags& flags) {
  if (flags.anomaly.size() != series.size() || flags.score.size() != series.size()) {
    throw ConfigError("anomaly flags must match the series length");
  }
  out << "timestamp,value,anomaly,score\n";
  const auto ts = series.timestamps();
  const auto vs = series.values();
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << ts[i] << ',' << format_double(vs[i]) << ',' << (flags.anomaly[i] ? 1 : 0) << ','
        << format_double(flags.score[i]) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
  auto out = open_output(path);
  write_csv(out, series);
  finish_output(out, path);
}

void write_csv(const std::filesystem::path& path, const TimeSeries& series,
               const PointFlags& flags) {
  auto out = open_output(path);
  write_csv(out, series, flags);
  finish_output(out, path);
}

std::size_t infer_period(const TimeSeries& series, std::optional<std::size_t> hint) {
  if (hint) {
    if (*hint == 0) throw PeriodError("period hint must be positive");
    return *hint;
  }
  switch (series.cadence()) {
    case 60:
      return 1440;
    case 3600:
      return 24;
    default:
      throw PeriodError(fmt::format(
          "cannot infer the seasonal period for a cadence of {} s; supply one explicitly",
          series.cadence()));
  }
}

std::vector<bool> read_labels(std::istream& in, const TimeSeries& series) {
  std::string line;
  std::string header_line;
  while (std::getline(in, header_line)) {
    if (!trim(header_line).empty()) break;
  }
  auto header = split_fields(header_line);
  const std::size_t ts_col = find_column(header, "timestamp");
  const std::size_t label_col = find_column(header, "label");
  if (ts_col == header.size() || label_col == header.size()) {
    throw IngestError("labels header must contain 'timestamp' and 'label' columns");
  }

  std::vector<bool> labels(series.size(), false);
  const auto ts = series.timestamps();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() <= std::max(ts_col, label_col)) {
      throw IngestError(fmt::format("labels line {}: missing fields", line_no));
    }
    const Timestamp t = parse_timestamp(fields[ts_col]);
    const auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end() || *it != t) {
      throw IngestError(fmt::format("labels line {}: timestamp {} is not in the series",
                                    line_no, t));
    }
    const std::string_view label = fields[label_col];
    if (label != "0" && label != "1") {
      throw IngestError(fmt::format("labels line {}: label must be 0 or 1", line_no));
    }
    labels[static_cast<std::size_t>(it - ts.begin())] = label == "1";
  }
  return labels;
}

std::vector<bool> load_labels(const std::filesystem::path& path, const TimeSeries& series) {
  auto in = open_input(path);
  return read_labels(in, series);
}

void write_labels(std::ostream& out, const LabeledSeries& labeled) {
  out << "timestamp,label\n";
  const auto ts = labeled.series.timestamps();
  for (std::size_t i = 0; i < labeled.labels.size(); ++i) {
    out << ts[i] << ',' << (labeled.labels[i] ? 1 : 0) << '\n';
  }
}

void write_labels(const std::filesystem::path& path, const LabeledSeries& labeled) {
  auto out = open_output(path);
  write_labels(out, labeled);
  finish_output(out, path);
}

}  // namespace anomaly
