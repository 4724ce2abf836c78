#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anomaly/detectors.hpp"

namespace anomaly::cli {

enum ExitCode : int {
  kExitClean = 0,
  kExitError = 1,
  kExitAnomalies = 2,
  kExitReport = 3,
};

inline constexpr int kSchemaVersion = 1;

/// Days of history analysed by the report command.
inline constexpr int kReportWindowDays = 14;

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

/// JSON summary of a detection run. `window_days` is 0 for the whole series.
nlohmann::ordered_json run_summary(const TimeSeries& analysed, const AnomalyReport& report,
                                   int window_days, int exit_status);

/// Number of trailing samples covering `days` at the series cadence.
std::size_t window_length(const TimeSeries& series, int days);

}  // namespace anomaly::cli
