#include "anomaly_cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "anomaly/decomposition.hpp"
#include "anomaly/errors.hpp"
#include "anomaly/evaluation.hpp"
#include "anomaly/series.hpp"

namespace anomaly::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct DetectorFlags {
  std::string algo = "s-h-esd";
  double alpha = 0.05;
  double max_anoms = 0.10;
  std::string direction = "both";
  std::size_t period = 0;
  double threshold = 0.0;
  std::string threshold_mode = "value";
  CLI::Option* period_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;

  void add_to(CLI::App& app, bool with_algo) {
    if (with_algo) {
      app.add_option("--algo", algo, "three-sigma, grubbs, esd, s-esd or s-h-esd")
          ->capture_default_str();
    }
    app.add_option("--alpha", alpha, "Significance level")->capture_default_str();
    app.add_option("--max-anoms", max_anoms, "Largest fraction of points to flag")
        ->capture_default_str();
    app.add_option("--direction", direction, "pos, neg or both")->capture_default_str();
    period_opt = app.add_option("--period", period, "Samples per seasonal cycle");
    threshold_opt = app.add_option("--threshold", threshold, "Drop anomalies at or below this");
    app.add_option("--threshold-mode", threshold_mode, "value or deviation")
        ->capture_default_str();
  }

  DetectorConfig config() const {
    DetectorConfig c;
    c.algorithm = parse_algorithm(algo);
    c.alpha = alpha;
    c.max_anoms = max_anoms;
    c.direction = parse_direction(direction);
    if (period_opt && period_opt->count() > 0) c.period = period;
    if (threshold_opt && threshold_opt->count() > 0) c.threshold = threshold;
    c.threshold_mode = parse_threshold_mode(threshold_mode);
    validate(c);
    return c;
  }
};

struct InjectFlags {
  std::size_t count = 5;
  double magnitude_min = 8.0;
  double magnitude_max = 12.0;
  std::size_t width_min = 1;
  std::size_t width_max = 1;
  double positive_fraction = 1.0;
  std::size_t min_gap = 1;
  std::size_t knot_spacing = 0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void add_to(CLI::App& app) {
    app.add_option("--count", count, "Anomalous intervals per series")->capture_default_str();
    app.add_option("--magnitude-min", magnitude_min, "Smallest shift in residual sigmas")
        ->capture_default_str();
    app.add_option("--magnitude-max", magnitude_max, "Largest shift in residual sigmas")
        ->capture_default_str();
    app.add_option("--width-min", width_min, "Shortest interval")->capture_default_str();
    app.add_option("--width-max", width_max, "Longest interval")->capture_default_str();
    app.add_option("--positive-fraction", positive_fraction, "Probability of an upward shift")
        ->capture_default_str();
    app.add_option("--min-gap", min_gap, "Untouched samples between intervals")
        ->capture_default_str();
    app.add_option("--knot-spacing", knot_spacing, "Samples per spline knot (0: period / 8)")
        ->capture_default_str();
    seed_opt = app.add_option("--seed", seed, "Random seed");
  }

  InjectionSpec spec() const {
    if (seed_opt->count() == 0) throw ConfigError("--seed is required for injection");
    InjectionSpec s;
    s.count = count;
    s.magnitude_min = magnitude_min;
    s.magnitude_max = magnitude_max;
    s.width_min = width_min;
    s.width_max = width_max;
    s.positive_fraction = positive_fraction;
    s.min_gap = min_gap;
    s.seed = seed;
    return s;
  }
};

struct Context {
  std::ostream& out;
  std::shared_ptr<spdlog::logger> log;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
  auto logger = std::make_shared<spdlog::logger>("anomaly", std::move(sink));
  logger->set_pattern("%l: %v");
  const char* env = std::getenv("ANOMALY_LOG");
  logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
  return logger;
}

PointFlags flags_for(const TimeSeries& series, const AnomalyReport& report) {
  PointFlags flags;
  flags.anomaly.assign(series.size(), false);
  flags.score.assign(series.size(), 0.0);
  for (const Anomaly& a : report.anomalies) {
    flags.anomaly[a.index] = true;
    flags.score[a.index] = a.score;
  }
  return flags;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  file << text;
  if (!file) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::size_t knot_spacing_for(const TimeSeries& series, std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(2, infer_period(series, series.period()) / 8);
}

// Reads `timestamp,<flag>` rows where the flag column is `anomaly` or `label`.
std::vector<std::pair<Timestamp, bool>> read_flag_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw IngestError(fmt::format("{} is empty", path.string()));
  auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      cells.push_back(cell);
    }
    return cells;
  };
  const auto header = split(line);
  std::optional<std::size_t> ts_col;
  std::optional<std::size_t> flag_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "timestamp") ts_col = i;
    if (header[i] == "anomaly" || header[i] == "label") flag_col = i;
  }
  if (!ts_col || !flag_col) {
    throw IngestError(fmt::format("{} needs a timestamp and an anomaly or label column",
                                  path.string()));
  }
  std::vector<std::pair<Timestamp, bool>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() <= std::max(*ts_col, *flag_col)) {
      throw IngestError(fmt::format("{}:{}: too few columns", path.string(), line_no));
    }
    const std::string& flag = cells[*flag_col];
    if (flag != "0" && flag != "1") {
      throw IngestError(fmt::format("{}:{}: flag must be 0 or 1, got '{}'", path.string(),
                                    line_no, flag));
    }
    rows.emplace_back(parse_timestamp(cells[*ts_col]), flag == "1");
  }
  return rows;
}

void print_rows(std::ostream& out, std::span<const CorpusRow> rows) {
  std::vector<CorpusRow> totals;
  for (const CorpusRow& r : rows) {
    if (r.series == kAggregateRowName) totals.push_back(r);
  }
  write_results_csv(out, totals);
}

int cmd_detect(Context& ctx, const std::string& input, const DetectorFlags& flags, bool repair,
               int window_days, bool fail_on_anomaly, const std::string& out_prefix) {
  const DetectorConfig config = flags.config();
  CsvSchema schema;
  schema.repair_gaps = repair;
  TimeSeries series = load_csv(input, schema);
  if (window_days < 0) throw ConfigError("--window-days must be non-negative");
  if (window_days > 0) series = series.tail(window_length(series, window_days));

  const AnomalyReport report = detect(series, config);
  const int status = fail_on_anomaly && !report.empty() ? kExitAnomalies : kExitClean;

  write_csv(fs::path(out_prefix + ".csv"), series, flags_for(series, report));
  write_text(out_prefix + ".json", run_summary(series, report, window_days, status).dump(2) + "\n");
  ctx.log->info("{} anomalies in {} points ({:.3f}%)", report.anomalies.size(), series.size(),
                report.percent_anomalous);
  return status;
}

int cmd_decompose(Context& ctx, const std::string& input, std::size_t period,
                  const std::string& variant, bool repair, const std::string& out_path) {
  CsvSchema schema;
  schema.repair_gaps = repair;
  const TimeSeries series = load_csv(input, schema);
  StlConfig stl;
  stl.period = infer_period(series, period > 0 ? std::optional(period) : series.period());
  Decomposition d = stl_decompose(series, stl);
  if (variant == "median") {
    d = median_residual(series, std::move(d));
    std::fill(d.trend.begin(), d.trend.end(), d.series_median);
  } else if (variant != "classic") {
    throw ConfigError(fmt::format("unknown variant '{}'", variant));
  }

  std::ostringstream text;
  text << "timestamp,value,seasonal,trend,residual\n";
  const auto ts = series.timestamps();
  for (std::size_t i = 0; i < series.size(); ++i) {
    text << ts[i] << ',' << format_double(series[i]) << ',' << format_double(d.seasonal[i])
         << ',' << format_double(d.trend[i]) << ',' << format_double(d.residual[i]) << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    ctx.out << text.str();
  } else {
    write_text(out_path, text.str());
  }
  return kExitClean;
}

int cmd_inject(Context& ctx, const std::string& input, const InjectFlags& flags,
               std::size_t period, const std::string& out_prefix) {
  TimeSeries raw = load_csv(input);
  if (period > 0) raw = raw.with_period(period);
  const InjectionSpec spec = flags.spec();
  const TimeSeries baseline = bspline_smooth(raw, knot_spacing_for(raw, flags.knot_spacing));
  const LabeledSeries labeled = inject(raw, baseline, spec);
  write_csv(fs::path(out_prefix + ".csv"), labeled.series);
  write_labels(fs::path(out_prefix + ".labels.csv"), labeled);
  ctx.log->info("injected {} labelled points", labeled.anomaly_indices().size());
  return kExitClean;
}

int cmd_evaluate_files(Context& ctx, const std::string& detections, const std::string& labels,
                       double beta, std::size_t tolerance, const std::string& out_path) {
  const auto found = read_flag_file(detections);
  const auto truth = read_flag_file(labels);
  if (found.size() != truth.size()) {
    throw EvalError(fmt::format("detections cover {} points but labels cover {}", found.size(),
                                truth.size()));
  }
  std::vector<std::size_t> s;
  std::vector<std::size_t> g;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].first != truth[i].first) {
      throw EvalError(fmt::format("row {}: detection timestamp {} does not match label {}", i + 1,
                                  found[i].first, truth[i].first));
    }
    if (found[i].second) s.push_back(i);
    if (truth[i].second) g.push_back(i);
  }
  std::vector<CorpusRow> rows{{fs::path(detections).stem().string(), "detections",
                               score(s, g, found.size(), beta, tolerance)}};
  const auto totals = aggregate(rows);
  rows.insert(rows.end(), totals.begin(), totals.end());
  if (!out_path.empty()) {
    std::ostringstream table;
    write_results_csv(table, rows);
    write_text(out_path, table.str());
  }
  print_rows(ctx.out, rows);
  return kExitClean;
}

int cmd_evaluate_inject(Context& ctx, const std::vector<std::string>& inputs,
                        const std::vector<std::string>& algos, const DetectorFlags& flags,
                        const InjectFlags& inject_flags, double beta, std::size_t tolerance,
                        unsigned jobs, const std::string& out_path) {
  if (inputs.empty()) throw ConfigError("--inject needs at least one series file");
  std::vector<NamedSeries> corpus;
  for (const std::string& path : inputs) {
    TimeSeries s = load_csv(path);
    if (flags.period_opt->count() > 0) s = s.with_period(flags.period);
    corpus.push_back({fs::path(path).stem().string(), std::move(s)});
  }
  std::vector<NamedDetector> detectors;
  for (const std::string& name : algos) {
    DetectorFlags f = flags;
    f.algo = name;
    detectors.push_back({std::string(to_string(parse_algorithm(name))), f.config()});
  }
  CorpusOptions options;
  options.beta = beta;
  options.tolerance = tolerance;
  options.knot_spacing = inject_flags.knot_spacing;
  options.jobs = std::max(1u, jobs);
  const auto rows = run_corpus(corpus, detectors, inject_flags.spec(), options);
  if (!out_path.empty()) {
    std::ostringstream table;
    write_results_csv(table, rows);
    write_text(out_path, table.str());
  }
  print_rows(ctx.out, rows);
  return kExitClean;
}

std::string report_markdown(const TimeSeries& window, const AnomalyReport& report,
                            Timestamp day_start, const std::vector<const Anomaly*>& recent) {
  const Timestamp last = window.timestamps().back();
  std::string text;
  text += fmt::format("# Anomaly report for {}\n\n", format_iso8601(last));
  text += fmt::format("- Analysed window: {} to {} ({} points, period {})\n",
                      format_iso8601(window.timestamps().front()), format_iso8601(last),
                      window.size(), report.period);
  text += fmt::format("- Detector: {} (alpha {}, max_anoms {})\n",
                      to_string(report.config.algorithm), report.config.alpha,
                      report.config.max_anoms);
  text += fmt::format("- Anomalies in the window: {} ({:.3f}%)\n", report.anomalies.size(),
                      report.percent_anomalous);
  text += fmt::format("- Anomalies since {}: {}\n\n", format_iso8601(day_start), recent.size());
  text += "| timestamp | value | score | direction |\n";
  text += "|---|---|---|---|\n";
  for (const Anomaly* a : recent) {
    text += fmt::format("| {} | {} | {:.4f} | {} |\n", format_iso8601(a->timestamp),
                        format_double(a->value), a->score, to_string(a->direction()));
  }
  text += "\nThe attached CSV holds the whole analysed window with per-point flags.\n";
  return text;
}

int cmd_report(Context& ctx, const std::string& input, DetectorFlags flags, bool repair,
               const std::string& out_dir) {
  flags.algo = "s-h-esd";
  const DetectorConfig config = flags.config();
  CsvSchema schema;
  schema.repair_gaps = repair;
  const TimeSeries series = load_csv(input, schema);
  const std::size_t needed = window_length(series, kReportWindowDays);
  if (series.size() < needed) {
    throw ConfigError(fmt::format("report needs {} days of data ({} points), got {}",
                                  kReportWindowDays, needed, series.size()));
  }
  const TimeSeries window = series.tail(needed);
  const AnomalyReport report = detect(window, config);

  // The final day is the trailing 24 hours ending at the last sample.
  const Timestamp last = window.timestamps().back();
  const Timestamp day_start = last - kSecondsPerDay;
  std::vector<const Anomaly*> recent;
  for (const Anomaly& a : report.anomalies) {
    if (a.timestamp > day_start) recent.push_back(&a);
  }
  if (recent.empty()) {
    ctx.log->info("no anomalies in the final day ({} in the window)", report.anomalies.size());
    return kExitClean;
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text(dir / "anomaly_report.md", report_markdown(window, report, day_start, recent));
  write_csv(dir / "anomaly_report.csv", window, flags_for(window, report));
  ctx.log->info("report written to {}", (dir / "anomaly_report.md").string());
  return kExitReport;
}

int cmd_generate(Context& ctx, SeasonalSpec spec, const std::string& out_path) {
  const TimeSeries series = generate_seasonal(spec);
  if (out_path.empty() || out_path == "-") {
    write_csv(ctx.out, series);
  } else {
    write_csv(fs::path(out_path), series);
  }
  return kExitClean;
}

}  // namespace

std::size_t window_length(const TimeSeries& series, int days) {
  if (days <= 0) throw ConfigError(fmt::format("window must be positive, got {} days", days));
  if (series.cadence() <= 0) throw ConfigError("series cadence is unknown");
  return static_cast<std::size_t>(static_cast<Timestamp>(days) * kSecondsPerDay /
                                  series.cadence());
}

json run_summary(const TimeSeries& analysed, const AnomalyReport& report, int window_days,
                 int exit_status) {
  const DetectorConfig& c = report.config;
  json config;
  config["algorithm"] = to_string(c.algorithm);
  config["alpha"] = c.alpha;
  config["max_anoms"] = c.max_anoms;
  config["direction"] = to_string(c.direction);
  config["period"] = c.period ? json(*c.period) : json(nullptr);
  config["threshold"] = c.threshold ? json(*c.threshold) : json(nullptr);
  config["threshold_mode"] = to_string(c.threshold_mode);
  config["mad_scale"] = c.mad_scale;
  config["window_days"] = window_days > 0 ? json(window_days) : json(nullptr);

  json series;
  series["length"] = analysed.size();
  series["period"] = report.period > 0 ? json(report.period) : json(nullptr);
  series["start"] = analysed.empty() ? json(nullptr)
                                     : json(format_iso8601(analysed.timestamps().front()));
  series["end"] = analysed.empty() ? json(nullptr)
                                   : json(format_iso8601(analysed.timestamps().back()));

  json anomalies = json::array();
  for (const Anomaly& a : report.anomalies) {
    json item;
    item["timestamp"] = format_iso8601(a.timestamp);
    item["epoch"] = a.timestamp;
    item["index"] = a.index;
    item["value"] = a.value;
    item["score"] = a.score;
    item["direction"] = to_string(a.direction());
    anomalies.push_back(std::move(item));
  }

  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["config"] = std::move(config);
  summary["series"] = std::move(series);
  summary["anomaly_count"] = report.anomalies.size();
  summary["percent_anomalous"] = report.percent_anomalous;
  summary["anomalies"] = std::move(anomalies);
  summary["exit_status"] = exit_status;
  return summary;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seasonal time series anomaly detection", "anomaly"};
  app.require_subcommand(1);

  bool repair = false;
  std::string input;
  std::string detect_out;
  std::string decompose_out;
  std::string inject_out;
  std::string evaluate_out;
  std::string report_out;
  std::string generate_out;

  DetectorFlags detect_flags;
  int window_days = 0;
  bool fail_on_anomaly = false;
  auto* detect_cmd = app.add_subcommand("detect", "Flag anomalies in a CSV series");
  detect_cmd->add_option("input", input, "Input CSV (timestamp,value)")->required();
  detect_flags.add_to(*detect_cmd, true);
  detect_cmd->add_option("--window-days", window_days, "Analyse only the trailing days");
  detect_cmd->add_flag("--fail-on-anomaly", fail_on_anomaly, "Exit 2 when anomalies are found");
  detect_cmd->add_flag("--repair", repair, "Fill short gaps by interpolation");
  detect_cmd->add_option("--out", detect_out, "Output prefix for .csv and .json")
      ->default_val("anomalies");

  std::size_t decompose_period = 0;
  std::string variant = "classic";
  auto* decompose_cmd = app.add_subcommand("decompose", "Write seasonal, trend and residual");
  decompose_cmd->add_option("input", input, "Input CSV")->required();
  decompose_cmd->add_option("--period", decompose_period, "Samples per seasonal cycle");
  decompose_cmd->add_option("--variant", variant, "Residual formula: classic or median")
      ->capture_default_str();
  decompose_cmd->add_flag("--repair", repair, "Fill short gaps by interpolation");
  decompose_cmd->add_option("--out", decompose_out, "Output CSV (default stdout)");

  InjectFlags inject_flags;
  std::size_t inject_period = 0;
  auto* inject_cmd = app.add_subcommand("inject", "Add labelled anomalies to a smoothed series");
  inject_cmd->add_option("input", input, "Input CSV")->required();
  inject_flags.add_to(*inject_cmd);
  inject_cmd->add_option("--period", inject_period, "Samples per seasonal cycle");
  inject_cmd->add_option("--out", inject_out, "Output prefix for .csv and .labels.csv")
      ->default_val("injected");

  DetectorFlags eval_flags;
  InjectFlags eval_inject;
  std::string detections;
  std::string labels;
  bool use_inject = false;
  std::vector<std::string> eval_inputs;
  std::vector<std::string> algos{"s-esd", "s-h-esd"};
  double beta = 1.0;
  std::size_t tolerance = 0;
  unsigned jobs = 1;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score detections against labels");
  evaluate_cmd->add_option("--detections", detections, "Detection CSV (timestamp,...,anomaly)");
  evaluate_cmd->add_option("--labels", labels, "Labels CSV (timestamp,label)");
  evaluate_cmd->add_flag("--inject", use_inject, "Inject into the inputs and run detectors");
  evaluate_cmd->add_option("inputs", eval_inputs, "Series CSVs for --inject");
  evaluate_cmd->add_option("--algo", algos, "Detectors to evaluate")->capture_default_str();
  eval_flags.add_to(*evaluate_cmd, false);
  eval_inject.add_to(*evaluate_cmd);
  evaluate_cmd->add_option("--beta", beta, "F-measure weight")->capture_default_str();
  evaluate_cmd->add_option("--tolerance", tolerance, "Match window in samples")
      ->capture_default_str();
  evaluate_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  evaluate_cmd->add_option("--out", evaluate_out, "Results table CSV");

  DetectorFlags report_flags;
  auto* report_cmd =
      app.add_subcommand("report", "Report anomalies in the final day of a 14-day window");
  report_cmd->add_option("input", input, "Input CSV")->required();
  report_flags.add_to(*report_cmd, false);
  report_cmd->add_flag("--repair", repair, "Fill short gaps by interpolation");
  report_cmd->add_option("--out", report_out, "Report directory")->default_val(".");

  SeasonalSpec seasonal;
  CLI::Option* generate_seed = nullptr;
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic seasonal series");
  generate_cmd->add_option("--period", seasonal.period, "Samples per cycle")->capture_default_str();
  generate_cmd->add_option("--cycles", seasonal.cycles, "Number of cycles")->capture_default_str();
  generate_cmd->add_option("--amplitude", seasonal.amplitude, "Amplitude of the first harmonic")
      ->capture_default_str();
  generate_cmd->add_option("--trend-slope", seasonal.trend_slope, "Trend per sample")
      ->capture_default_str();
  generate_cmd->add_option("--noise", seasonal.noise_sigma, "Gaussian noise sigma")
      ->capture_default_str();
  generate_cmd->add_option("--modes", seasonal.modes, "Harmonics per cycle")
      ->capture_default_str();
  generate_cmd->add_option("--cadence", seasonal.cadence, "Seconds between samples")
      ->capture_default_str();
  generate_cmd->add_option("--start", seasonal.start, "First timestamp (epoch seconds)")
      ->capture_default_str();
  generate_seed = generate_cmd->add_option("--seed", seasonal.seed, "Random seed");
  generate_cmd->add_option("--out", generate_out, "Output CSV (default stdout)");

  std::vector<std::string> rest;
  if (!args.empty()) rest.assign(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitClean : kExitError;
  }

  Context ctx{out, make_logger(err)};
  try {
    if (*detect_cmd) {
      return cmd_detect(ctx, input, detect_flags, repair, window_days, fail_on_anomaly, detect_out);
    }
    if (*decompose_cmd) return cmd_decompose(ctx, input, decompose_period, variant, repair, decompose_out);
    if (*inject_cmd) return cmd_inject(ctx, input, inject_flags, inject_period, inject_out);
    if (*evaluate_cmd) {
      if (use_inject) {
        return cmd_evaluate_inject(ctx, eval_inputs, algos, eval_flags, eval_inject, beta,
                                   tolerance, jobs, evaluate_out);
      }
      if (detections.empty() || labels.empty()) {
        throw ConfigError("evaluate needs --detections and --labels, or --inject");
      }
      return cmd_evaluate_files(ctx, detections, labels, beta, tolerance, evaluate_out);
    }
    if (*report_cmd) return cmd_report(ctx, input, report_flags, repair, report_out);
    if (*generate_cmd) {
      if (generate_seed->count() == 0) throw ConfigError("--seed is required");
      return cmd_generate(ctx, seasonal, generate_out);
    }
  } catch (const std::exception& e) {
    ctx.log->error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace anomaly::cli
