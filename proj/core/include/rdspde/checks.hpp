#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rdspde/rng.hpp"
#include "rdspde/simulator.hpp"

namespace rdspde {

enum class CheckStatus { pass, fail, warn };

std::string to_string(CheckStatus s);
CheckStatus parse_check_status(const std::string& s);

/// Outcome of one registered check. `measured` keeps insertion order so
/// reports are stable. `regime` states which slack convention applies:
/// "statistical" (3 standard errors), "algebraic" (1e-12 relative) or
/// "discretization" (1e-3 relative, must shrink as dt halves).
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  std::string regime;
  std::string anchor;
  std::vector<std::pair<std::string, double>> measured;
  double bound = 0.0;
  double std_error = 0.0;
  double wall_seconds = 0.0;
  std::string message;

  void measure(std::string key, double value) { measured.emplace_back(std::move(key), value); }
  /// NaN when `key` was not measured.
  double value(const std::string& key) const;
};

using CheckParams = std::map<std::string, double>;

struct CheckContext {
  SimConfig sim;
  CheckParams params;  // defaults merged with overrides
  StreamRange streams;
  int workers = 1;

  double param(const std::string& key) const;
  std::size_t count(const std::string& key) const;
};

struct CheckInfo {
  std::string name;
  std::string anchor;
  std::string regime;
  CheckParams defaults;
  std::function<void(const CheckContext&, CheckResult&)> run;
};

/// All checks in report order.
const std::vector<CheckInfo>& check_registry();

/// nullptr for unknown names.
const CheckInfo* find_check(const std::string& name);

/// Runs one check with its own stream block. Exceptions become a fail
/// result whose message carries the error text.
CheckResult run_check(const CheckInfo& info, const SimConfig& sim, const CheckParams& overrides,
                      const StreamRange& streams, int workers);

}  // namespace rdspde
