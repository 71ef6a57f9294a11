#pragma once

#include <filesystem>
#include <iosfwd>

#include "rdspde/ergodic.hpp"
#include "rdspde/simulator.hpp"

namespace rdspde {

/// Plain-text columnar ensemble file:
///
///   # format=rdspde-ensemble v1
///   # dim=1
///   # kmax=32
///   # ...                      (one key=value per line, see write_ensemble)
///   c0 c1 ... c{modes-1}       column header, flat mode order
///   <count rows of %.17g coefficients>
///
/// Doubles are written with 17 significant digits so a reload is exact.
void write_ensemble(const InvariantEnsemble& ens, std::ostream& out);
void write_ensemble(const InvariantEnsemble& ens, const std::filesystem::path& path);

/// Throws ConfigError (field = header key or "row N") on malformed input.
InvariantEnsemble read_ensemble(std::istream& in);
InvariantEnsemble read_ensemble(const std::filesystem::path& path);

/// CSV trace of a path: step,time,c0,...,c{modes-1}.
void write_path_trace(const PathSample& path, std::ostream& out);

}  // namespace rdspde
