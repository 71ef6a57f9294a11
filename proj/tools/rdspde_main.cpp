// rdspde: simulate, sample the invariant measure, run the verification
// suite and re-render reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdspde/config.hpp"
#include "rdspde/ensemble_io.hpp"
#include "rdspde/ergodic.hpp"
#include "rdspde/errors.hpp"
#include "rdspde/report.hpp"
#include "rdspde/suite.hpp"

namespace fs = std::filesystem;
using namespace rdspde;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

SuiteConfig load(const CommonOptions& o) {
  SuiteConfig cfg = load_suite_config(o.config);
  if (o.seed) cfg.sim.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

void print_summary(const SuiteReport& report) {
  std::printf("%-22s %-6s %10s  %s\n", "check", "status", "seconds", "message");
  for (const auto& r : report.results)
    std::printf("%-22s %-6s %10.2f  %s\n", r.name.c_str(), to_string(r.status).c_str(), r.wall_seconds,
                r.message.c_str());
  std::printf("%zu checks: %zu pass, %zu warn, %zu fail\n", report.results.size(), report.count(CheckStatus::pass),
              report.count(CheckStatus::warn), report.count(CheckStatus::fail));
}

std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : list + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

int run_simulate(const CommonOptions& o, double horizon) {
  const SuiteConfig cfg = load(o);
  const Simulator sim(cfg.sim);
  const PathSample path = sim.simulate_path(SpectralField(sim.basis()), horizon > 0 ? horizon : cfg.sim.horizon, 0);
  fs::create_directories(cfg.output_dir);
  const fs::path file = cfg.output_dir / "trace.csv";
  std::ofstream out(file);
  write_path_trace(path, out);
  std::printf("wrote %zu steps to %s\n", path.steps, file.c_str());
  return 0;
}

int run_sample(const CommonOptions& o, std::size_t snapshots, double burn_in, std::size_t thinning) {
  const SuiteConfig cfg = load(o);
  const Simulator sim(cfg.sim);
  const InvariantEnsemble ens =
      sample_invariant(sim, burn_in > 0 ? burn_in : default_burn_in(sim.basis()), snapshots,
                       thinning > 0 ? thinning : default_thinning(sim));
  fs::create_directories(cfg.output_dir);
  const fs::path file = cfg.output_dir / "ensemble.txt";
  write_ensemble(ens, file);
  std::printf("wrote %zu snapshots to %s (stationarity z = %.3f%s)\n", ens.count, file.c_str(), ens.stationarity_z,
              ens.stationary ? "" : ", flagged");
  return 0;
}

int run_verify(const CommonOptions& o, const std::string& checks, int workers, const std::string& format) {
  SuiteConfig cfg = load(o);
  if (!checks.empty()) select_checks(cfg, split_names(checks));
  if (workers > 0) cfg.workers = workers;
  if (!format.empty()) cfg.format = parse_report_format(format);
  const SuiteReport report = run_suite(cfg);
  print_summary(report);
  for (const auto& p : write_report(report, cfg.output_dir, cfg.format)) std::printf("wrote %s\n", p.c_str());
  return report.exit_code();
}

int run_report(const std::string& in, const std::string& out, const std::string& format) {
  fs::path path = in;
  if (fs::is_directory(path)) path /= "report.json";
  const SuiteReport report = read_report(path);
  print_summary(report);
  if (!out.empty())
    for (const auto& p : write_report(report, out, parse_report_format(format.empty() ? "both" : format)))
      std::printf("wrote %s\n", p.c_str());
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized reaction-diffusion SPDE simulator and verification harness"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Suite configuration (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Master seed (overrides the config)");
    sub->add_option("--out", common.out, "Output directory (overrides the config)");
  };

  double horizon = 0.0;
  auto* simulate = app.add_subcommand("simulate", "Write a trajectory trace (trace.csv) started at x0 = 0");
  add_common(simulate);
  simulate->add_option("--horizon", horizon, "Final time (default: config horizon)");

  std::size_t snapshots = 10000, thinning = 0;
  double burn_in = 0.0;
  auto* sample = app.add_subcommand("sample-invariant", "Sample and persist an invariant ensemble (ensemble.txt)");
  add_common(sample);
  sample->add_option("--snapshots", snapshots, "Number of snapshots")->check(CLI::Range(100, 100000000));
  sample->add_option("--burn-in", burn_in, "Burn-in time (default 20 / lambda_1)");
  sample->add_option("--thinning", thinning, "Steps between snapshots (default ceil(1 / (lambda_1 dt)))");

  std::string checks, format;
  int workers = 0;
  auto* verify = app.add_subcommand("verify", "Run the verification suite and write reports");
  add_common(verify);
  verify->add_option("--checks", checks, "Comma-separated subset of checks");
  verify->add_option("--workers", workers, "Worker threads (default: RDSPDE_WORKERS or hardware)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv", "both"}));

  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Re-render a persisted report");
  report->add_option("--in", report_in, "report.json or the directory holding it")->required();
  report->add_option("--out", report_out, "Directory for re-rendered files");
  report->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(common, horizon);
    if (*sample) return run_sample(common, snapshots, burn_in, thinning);
    if (*verify) return run_verify(common, checks, workers, format);
    if (*report) return run_report(report_in, report_out, format);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
