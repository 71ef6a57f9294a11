#include "rdspde/ensemble_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

constexpr const char* kFormat = "rdspde-ensemble v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const std::map<std::string, std::string>& header, const std::string& key) {
  const auto it = header.find(key);
  if (it == header.end()) throw ConfigError(key, "missing header entry");
  T value{};
  const std::string& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError(key, "cannot parse '" + s + "'");
  return value;
}

}  // namespace

void write_ensemble(const InvariantEnsemble& ens, std::ostream& out) {
  const auto& b = ens.basis;
  out << "# format=" << kFormat << '\n'
      << "# dim=" << b.dim() << '\n'
      << "# kmax=" << b.kmax() << '\n'
      << "# grid_size=" << b.grid_size() << '\n'
      << "# count=" << ens.count << '\n'
      << "# alpha=" << fmt(ens.alpha) << '\n'
      << "# burn_in=" << fmt(ens.burn_in) << '\n'
      << "# dt=" << fmt(ens.dt) << '\n'
      << "# thinning=" << ens.thinning << '\n'
      << "# seed=" << ens.seed << '\n'
      << "# stream=" << ens.stream << '\n'
      << "# config_hash=" << ens.config_hash << '\n'
      << "# stationary=" << (ens.stationary ? 1 : 0) << '\n'
      << "# stationarity_z=" << fmt(ens.stationarity_z) << '\n';
  const std::size_t modes = b.mode_count();
  for (std::size_t k = 0; k < modes; ++k) out << (k ? " c" : "c") << k;
  out << '\n';
  for (std::size_t i = 0; i < ens.count; ++i) {
    const auto c = ens.coeffs(i);
    for (std::size_t k = 0; k < modes; ++k) out << (k ? " " : "") << fmt(c[k]);
    out << '\n';
  }
}

void write_ensemble(const InvariantEnsemble& ens, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("path", "cannot open '" + path.string() + "' for writing");
  write_ensemble(ens, out);
}

InvariantEnsemble read_ensemble(std::istream& in) {
  std::map<std::string, std::string> header;
  std::string line;
  while (in.peek() == '#' && std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(1, eq - 1);
    key.erase(0, key.find_first_not_of(' '));
    header[key] = line.substr(eq + 1);
  }
  if (header["format"] != kFormat) throw ConfigError("format", "expected '" + std::string(kFormat) + "'");

  SpectralBasis basis(parse_number<int>(header, "dim"), parse_number<int>(header, "kmax"),
                      parse_number<int>(header, "grid_size"));
  InvariantEnsemble ens{basis, {}, parse_number<std::size_t>(header, "count")};
  ens.alpha = parse_number<double>(header, "alpha");
  ens.burn_in = parse_number<double>(header, "burn_in");
  ens.dt = parse_number<double>(header, "dt");
  ens.thinning = parse_number<std::size_t>(header, "thinning");
  ens.seed = parse_number<std::uint64_t>(header, "seed");
  ens.stream = parse_number<std::uint64_t>(header, "stream");
  ens.config_hash = parse_number<std::uint64_t>(header, "config_hash");
  ens.stationary = parse_number<int>(header, "stationary") != 0;
  ens.stationarity_z = parse_number<double>(header, "stationarity_z");

  std::getline(in, line);  // column header
  const std::size_t modes = basis.mode_count();
  ens.data.reserve(ens.count * modes);
  for (std::size_t i = 0; i < ens.count; ++i) {
    if (!std::getline(in, line)) throw ConfigError("row " + std::to_string(i), "file ends early");
    std::istringstream row(line);
    std::string tok;
    std::size_t k = 0;
    while (row >> tok) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ConfigError("row " + std::to_string(i), "cannot parse '" + tok + "'");
      ens.data.push_back(v);
      ++k;
    }
    if (k != modes) throw ConfigError("row " + std::to_string(i), "expected " + std::to_string(modes) + " values");
  }
  return ens;
}

InvariantEnsemble read_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path.string() + "'");
  return read_ensemble(in);
}

void write_path_trace(const PathSample& path, std::ostream& out) {
  const std::size_t modes = path.basis.mode_count();
  out << "step,time";
  for (std::size_t k = 0; k < modes; ++k) out << ",c" << k;
  out << '\n';
  for (std::size_t m = 0; m <= path.steps; ++m) {
    out << m << ',' << fmt(path.time(m));
    for (double v : path.state_coeffs(m)) out << ',' << fmt(v);
    out << '\n';
  }
}

}  // namespace rdspde
