#include "rdspde/suite.hpp"

#include <algorithm>

#include "rdspde/parallel.hpp"

namespace rdspde {

namespace {

constexpr std::uint64_t kStreamBlocks = 64;

std::uint64_t registry_position(const std::string& name) {
  const auto& reg = check_registry();
  for (std::size_t i = 0; i < reg.size(); ++i)
    if (reg[i].name == name) return i;
  return reg.size();
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& cfg) {
  SuiteReport report;
  report.sim = cfg.sim;
  const std::size_t n = cfg.checks.size();
  report.results.resize(n);
  if (n == 0) return report;

  const int workers = cfg.workers > 0 ? cfg.workers : default_workers();
  const int outer = std::max(1, std::min(workers, static_cast<int>(n)));
  const int inner = std::max(1, workers / outer);
  const StreamRange all{};
  parallel_for(n, outer, [&](std::size_t i) {
    const CheckSpec& spec = cfg.checks[i];
    const CheckInfo* info = find_check(spec.name);
    if (!info) {
      report.results[i].name = spec.name;
      report.results[i].message = "no such check";
      return;
    }
    report.results[i] =
        run_check(*info, cfg.sim, spec.params, all.split(registry_position(spec.name), kStreamBlocks), inner);
  });
  return report;
}

}  // namespace rdspde
