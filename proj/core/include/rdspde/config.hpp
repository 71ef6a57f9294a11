#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rdspde/simulator.hpp"

namespace rdspde {

/// Report formats written by the suite.
enum class ReportFormat { json, csv, both };

ReportFormat parse_report_format(const std::string& s);
std::string to_string(ReportFormat f);

/// One selected check with its parameter overrides.
struct CheckSpec {
  std::string name;
  std::map<std::string, double> params;
};

/// Suite configuration, YAML schema version 1:
///
///   version: 1
///   sim:
///     dim: 1
///     kmax: 32
///     gamma: 0.0
///     alpha: 0.1
///     dt: 0.005
///     horizon: 0.5
///     seed: 1
///     poly: [0, 0, 0, -1]     # ascending coefficients; [] or [0] is p = 0
///   output:
///     dir: rdspde-report
///     format: both            # json | csv | both
///   workers: 2                # optional, else RDSPDE_WORKERS / hardware
///   checks:                   # optional: absent = every check, {} = none
///     bel_vs_fd: {samples: 10000}
///     gradient_identity: {}
///
/// Check parameters are numeric; names and keys are validated against the
/// check registry.
struct SuiteConfig {
  SimConfig sim;
  std::vector<CheckSpec> checks;
  std::filesystem::path output_dir = "rdspde-report";
  ReportFormat format = ReportFormat::both;
  int workers = 0;  // 0: default_workers()
};

/// Throws ConfigError with the offending field and source line.
SuiteConfig parse_suite_config(const std::string& yaml_text);
SuiteConfig load_suite_config(const std::filesystem::path& path);

/// Loads `path` and returns the validated simulation block.
SimConfig validate_config(const std::filesystem::path& path);

/// Keeps only the named checks (in registry order). Unknown names throw.
void select_checks(SuiteConfig& cfg, const std::vector<std::string>& names);

}  // namespace rdspde
