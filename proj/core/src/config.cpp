#include "rdspde/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "rdspde/checks.hpp"
#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <class T>
T scalar(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field, "expected a scalar value", line_of(n));
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "cannot parse '" + n.Scalar() + "'", line_of(n));
  }
}

void require_map(const YAML::Node& n, const std::string& field) {
  if (!n.IsMap()) throw ConfigError(field, "expected a mapping", line_of(n));
}

void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key", line_of(kv.first));
  }
}

SimConfig parse_sim(const YAML::Node& node) {
  require_map(node, "sim");
  reject_unknown(node, {"dim", "kmax", "gamma", "alpha", "dt", "horizon", "seed", "poly"}, "sim.");
  SimConfig cfg;
  std::map<std::string, int> lines;
  for (const auto& kv : node) lines[kv.first.as<std::string>()] = line_of(kv.second);
  if (node["dim"]) cfg.dim = scalar<int>(node["dim"], "sim.dim");
  if (node["kmax"]) cfg.kmax = scalar<int>(node["kmax"], "sim.kmax");
  if (node["gamma"]) cfg.gamma = scalar<double>(node["gamma"], "sim.gamma");
  if (node["alpha"]) cfg.alpha = scalar<double>(node["alpha"], "sim.alpha");
  if (node["dt"]) cfg.dt = scalar<double>(node["dt"], "sim.dt");
  if (node["horizon"]) cfg.horizon = scalar<double>(node["horizon"], "sim.horizon");
  if (node["seed"]) cfg.seed = scalar<std::uint64_t>(node["seed"], "sim.seed");
  if (const YAML::Node p = node["poly"]) {
    if (!p.IsSequence()) throw ConfigError("sim.poly", "expected a list of ascending coefficients", line_of(p));
    std::vector<double> coeffs;
    for (const auto& c : p) coeffs.push_back(scalar<double>(c, "sim.poly"));
    try {
      cfg.poly = Polynomial(std::move(coeffs));
    } catch (const DomainError& e) {
      throw ConfigError("sim.poly", e.what(), line_of(p));
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const auto it = lines.find(e.field());
    throw ConfigError("sim." + e.field(), e.detail(), it == lines.end() ? line_of(node) : it->second);
  }
  return cfg;
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  if (s == "both") return ReportFormat::both;
  throw ConfigError("format", "expected json, csv or both (got '" + s + "')");
}

std::string to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::json:
      return "json";
    case ReportFormat::csv:
      return "csv";
    case ReportFormat::both:
      break;
  }
  return "both";
}

SuiteConfig parse_suite_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.msg, e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError("", "top level must be a mapping", 1);
  reject_unknown(root, {"version", "sim", "output", "workers", "checks"}, "");
  if (!root["version"]) throw ConfigError("version", "missing schema version", 1);
  if (scalar<int>(root["version"], "version") != 1)
    throw ConfigError("version", "unsupported schema version (expected 1)", line_of(root["version"]));

  SuiteConfig cfg;
  if (!root["sim"]) throw ConfigError("sim", "missing simulation block", 1);
  cfg.sim = parse_sim(root["sim"]);

  if (const YAML::Node out = root["output"]) {
    require_map(out, "output");
    reject_unknown(out, {"dir", "format"}, "output.");
    if (out["dir"]) cfg.output_dir = scalar<std::string>(out["dir"], "output.dir");
    if (out["format"]) {
      try {
        cfg.format = parse_report_format(scalar<std::string>(out["format"], "output.format"));
      } catch (const ConfigError& e) {
        throw ConfigError("output.format", e.detail(), line_of(out["format"]));
      }
    }
  }
  if (const YAML::Node w = root["workers"]) {
    cfg.workers = scalar<int>(w, "workers");
    if (cfg.workers < 1) throw ConfigError("workers", "must be at least 1", line_of(w));
  }

  const YAML::Node checks = root["checks"];
  if (!checks) {
    for (const auto& info : check_registry()) cfg.checks.push_back({info.name, {}});
    return cfg;
  }
  if (checks.IsNull()) return cfg;
  require_map(checks, "checks");
  std::map<std::string, CheckSpec> selected;
  for (const auto& kv : checks) {
    const std::string name = kv.first.as<std::string>();
    const CheckInfo* info = find_check(name);
    if (!info) throw ConfigError("checks." + name, "no such check", line_of(kv.first));
    CheckSpec spec{name, {}};
    if (!kv.second.IsNull()) {
      require_map(kv.second, "checks." + name);
      for (const auto& p : kv.second) {
        const std::string key = p.first.as<std::string>();
        const std::string field = "checks." + name + "." + key;
        if (!info->defaults.count(key)) throw ConfigError(field, "unknown parameter", line_of(p.first));
        const double v = scalar<double>(p.second, field);
        if (!(v >= 0.0)) throw ConfigError(field, "must be nonnegative", line_of(p.second));
        spec.params[key] = v;
      }
    }
    selected[name] = std::move(spec);
  }
  for (const auto& info : check_registry())
    if (selected.count(info.name)) cfg.checks.push_back(std::move(selected[info.name]));
  return cfg;
}

SuiteConfig load_suite_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_suite_config(buf.str());
}

SimConfig validate_config(const std::filesystem::path& path) { return load_suite_config(path).sim; }

void select_checks(SuiteConfig& cfg, const std::vector<std::string>& names) {
  std::set<std::string> wanted;
  for (const auto& n : names) {
    if (!find_check(n)) throw ConfigError("checks", "no such check '" + n + "'");
    wanted.insert(n);
  }
  std::vector<CheckSpec> out;
  for (const auto& info : check_registry()) {
    if (!wanted.count(info.name)) continue;
    CheckSpec spec{info.name, {}};
    for (const auto& c : cfg.checks)
      if (c.name == info.name) spec = c;
    out.push_back(std::move(spec));
  }
  cfg.checks = std::move(out);
}

}  // namespace rdspde
