#include "rdspde/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double to_double(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::size_t SuiteReport::count(CheckStatus s) const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.status == s ? 1 : 0;
  return n;
}

int SuiteReport::exit_code() const { return count(CheckStatus::fail) == 0 ? 0 : 1; }

std::string report_json(const SuiteReport& report, bool include_timing) {
  ordered_json root;
  root["format"] = "rdspde-report v1";
  const SimConfig& s = report.sim;
  root["sim"] = {{"dim", s.dim},     {"kmax", s.kmax},       {"gamma", s.gamma}, {"alpha", s.alpha},
                 {"dt", s.dt},       {"horizon", s.horizon}, {"seed", s.seed},   {"poly", s.poly.coefficients()}};
  root["summary"] = {{"checks", report.results.size()},
                     {"pass", report.count(CheckStatus::pass)},
                     {"warn", report.count(CheckStatus::warn)},
                     {"fail", report.count(CheckStatus::fail)}};
  ordered_json checks = ordered_json::array();
  for (const auto& r : report.results) {
    ordered_json c;
    c["name"] = r.name;
    c["status"] = to_string(r.status);
    c["regime"] = r.regime;
    c["anchor"] = r.anchor;
    c["bound"] = number(r.bound);
    c["std_error"] = number(r.std_error);
    ordered_json measured = ordered_json::object();
    for (const auto& [k, v] : r.measured) measured[k] = number(v);
    c["measured"] = measured;
    if (include_timing) c["wall_seconds"] = r.wall_seconds;
    c["message"] = r.message;
    checks.push_back(std::move(c));
  }
  root["checks"] = std::move(checks);
  return root.dump(2) + "\n";
}

SuiteReport parse_report_json(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw ConfigError("report", e.what());
  }
  if (root.value("format", "") != "rdspde-report v1") throw ConfigError("format", "not an rdspde report");
  SuiteReport out;
  try {
    const auto& s = root.at("sim");
    out.sim.dim = s.at("dim").get<int>();
    out.sim.kmax = s.at("kmax").get<int>();
    out.sim.gamma = s.at("gamma").get<double>();
    out.sim.alpha = s.at("alpha").get<double>();
    out.sim.dt = s.at("dt").get<double>();
    out.sim.horizon = s.at("horizon").get<double>();
    out.sim.seed = s.at("seed").get<std::uint64_t>();
    out.sim.poly = Polynomial(s.at("poly").get<std::vector<double>>());
    for (const auto& c : root.at("checks")) {
      CheckResult r;
      r.name = c.at("name").get<std::string>();
      r.status = parse_check_status(c.at("status").get<std::string>());
      r.regime = c.at("regime").get<std::string>();
      r.anchor = c.at("anchor").get<std::string>();
      r.bound = to_double(c.at("bound"));
      r.std_error = to_double(c.at("std_error"));
      for (const auto& [k, v] : c.at("measured").items()) r.measure(k, to_double(v));
      r.wall_seconds = c.value("wall_seconds", 0.0);
      r.message = c.value("message", "");
      out.results.push_back(std::move(r));
    }
  } catch (const ordered_json::exception& e) {
    throw ConfigError("report", e.what());
  }
  return out;
}

std::string report_csv(const SuiteReport& report) {
  std::ostringstream os;
  os << "name,status,regime,bound,std_error,wall_seconds,anchor,measured,message\n";
  for (const auto& r : report.results) {
    std::string measured;
    for (const auto& [k, v] : r.measured) measured += (measured.empty() ? "" : ";") + k + "=" + fmt(v);
    os << csv_field(r.name) << ',' << to_string(r.status) << ',' << csv_field(r.regime) << ',' << fmt(r.bound) << ','
       << fmt(r.std_error) << ',' << fmt(r.wall_seconds) << ',' << csv_field(r.anchor) << ',' << csv_field(measured)
       << ',' << csv_field(r.message) << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> write_report(const SuiteReport& report, const std::filesystem::path& dir,
                                                ReportFormat format) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p);
    if (!out) throw ConfigError("output.dir", "cannot write '" + p.string() + "'");
    out << body;
    written.push_back(p);
  };
  if (format != ReportFormat::csv) emit(dir / "report.json", report_json(report));
  if (format != ReportFormat::json) emit(dir / "summary.csv", report_csv(report));
  return written;
}

SuiteReport read_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw ConfigError("report", "cannot read '" + json_path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_report_json(buf.str());
}

}  // namespace rdspde
