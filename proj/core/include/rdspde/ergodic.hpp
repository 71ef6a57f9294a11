#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdspde/functional.hpp"
#include "rdspde/gradient.hpp"
#include "rdspde/simulator.hpp"
#include "rdspde/stats.hpp"

namespace rdspde {

/// Thinned post-burn-in snapshots of one long chain started at x0 = 0;
/// an empirical stand-in for the invariant measure nu_alpha.
struct InvariantEnsemble {
  SpectralBasis basis;
  std::vector<double> data;  // count x modes, chain order
  std::size_t count = 0;
  double alpha = 0.0;
  double burn_in = 0.0;
  double dt = 0.0;
  std::size_t thinning = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t config_hash = 0;
  /// First-half vs second-half mean of |x|^2 agree within 3 combined stderr.
  bool stationary = true;
  double stationarity_z = 0.0;

  std::span<const double> coeffs(std::size_t i) const;
  SpectralField snapshot(std::size_t i) const;
};

/// 20 / lambda_1 and the step count closest to 1 / lambda_1 from above.
double default_burn_in(const SpectralBasis& basis);
std::size_t default_thinning(const Simulator& sim);

/// FNV-1a fingerprint of the simulation config and the sampling parameters.
std::uint64_t ensemble_fingerprint(const SimConfig& cfg, double burn_in, std::size_t snapshots, std::size_t thinning,
                                   std::uint64_t stream);

/// Requires burn_in >= 10 / lambda_1, thinning * dt >= 1 / lambda_1 and
/// n_snapshots >= 100. A failed stationarity diagnostic only sets the flag.
InvariantEnsemble sample_invariant(const Simulator& sim, double burn_in, std::size_t n_snapshots,
                                   std::size_t thinning, std::uint64_t stream = 0);

using SnapshotFn = std::function<double(std::span<const double>)>;

/// Ensemble mean of f with a batch-means stderr (snapshots are correlated).
Estimate ensemble_average(const InvariantEnsemble& ens, const SnapshotFn& f);
Estimate ensemble_average(const InvariantEnsemble& ens, const CylindricalFunctional& phi);

/// Per-mode E[x_k^2].
std::vector<Estimate> mode_second_moments(const InvariantEnsemble& ens);

/// Ensemble estimate of int |x|_{L^{2N}}^{2N} d nu_alpha.
Estimate moment_l2N(const InvariantEnsemble& ens, int N);

struct MeasureDistance {
  std::string functional;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double distance = 0.0;
  double std_error = 0.0;
  bool paired = false;
};

/// |int phi d nu_a - int phi d nu_b| over a fixed battery of test
/// functionals. Ensembles driven by identical noise (same seed, stream, dt,
/// thinning and length) are compared snapshot-by-snapshot.
std::vector<MeasureDistance> compare_measures(const InvariantEnsemble& a, const InvariantEnsemble& b);

/// Names of the functionals used by compare_measures, in report order.
std::vector<std::string> measure_battery_names();

struct InvarianceResult {
  std::string functional;
  Estimate before;
  Estimate after;
  double z = 0.0;
};

/// Evolves every snapshot forward by tau with fresh noise and compares the
/// ensemble averages of the battery before and after.
std::vector<InvarianceResult> invariance_check(const Simulator& sim, const InvariantEnsemble& ens, double tau,
                                               const SamplingOptions& options = {});

struct GaussianIbp {
  double lhs = 0.0;  // ensemble mean of <(-A)^{-1} D phi, h>
  double lhs_std_error = 0.0;
  bool has_quadrature = false;  // phi depends on a single projection
  double rhs_quadrature = 0.0;  // int phi v^h d nu by one-dimensional quadrature
  double rhs_monte_carlo = 0.0;  // ensemble mean of phi v^h
  double rhs_mc_std_error = 0.0;
};

struct IbpReport {
  double lhs = 0.0;  // int <D phi, h> d nu_alpha
  double lhs_std_error = 0.0;
  double phi_l2 = 0.0;  // ||phi||_{L^2(nu_alpha)}
  double phi_l2_std_error = 0.0;
  double h_norm = 0.0;
  double ah_norm = 0.0;
  double ph_l2 = 0.0;  // ||p'_alpha h||_{L^2(nu_alpha)}
  double beta = 0.0;
  double k_const = 0.0;
  double rhs_bound = 0.0;
  double ratio = 0.0;  // lhs / (phi_l2 * ah_norm)
  std::optional<GaussianIbp> gaussian;
};

/// Integration-by-parts diagnostics. rhs_bound is the t = 1 bound
///   K |phi| |h| + 2K/(1 - 2 beta) |phi| (|Ah| + ||p'_alpha h||).
/// When p = 0 the Gaussian identity with direction (-A)^{-1} h and
/// v^h(x) = <Q^{-1} x, (-A)^{-1} h>, Q = (1/2)(-A)^{-1-gamma}, is evaluated
/// too; the quadrature side needs a single-direction phi.
IbpReport ibp_check(const Simulator& sim, const InvariantEnsemble& ens, const CylindricalFunctional& phi,
                    const SpectralField& h, std::optional<double> beta = std::nullopt);

/// E[phi(x) v^h(x)] under the p = 0 invariant law, computed from the law of
/// <x, g> by one-dimensional quadrature.
double gaussian_ibp_quadrature(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& h);

}  // namespace rdspde
