#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rdspde/checks.hpp"
#include "rdspde/config.hpp"

namespace rdspde {

/// Results of one suite run plus the configuration that produced them.
struct SuiteReport {
  SimConfig sim;
  std::vector<CheckResult> results;

  std::size_t count(CheckStatus s) const;
  /// 0 iff no check failed; warnings do not count.
  int exit_code() const;
};

/// Deterministic JSON rendering. With include_timing = false the
/// wall-clock fields are omitted, which makes reports from identical
/// configurations byte-identical.
std::string report_json(const SuiteReport& report, bool include_timing = true);
SuiteReport parse_report_json(const std::string& text);

/// One row per check:
/// name,status,regime,bound,std_error,wall_seconds,anchor,measured,message
/// where `measured` is a ';'-separated list of key=value pairs.
std::string report_csv(const SuiteReport& report);

/// Writes report.json and/or summary.csv into `dir` (created if needed).
/// Returns the written paths.
std::vector<std::filesystem::path> write_report(const SuiteReport& report, const std::filesystem::path& dir,
                                                ReportFormat format);
SuiteReport read_report(const std::filesystem::path& json_path);

}  // namespace rdspde
