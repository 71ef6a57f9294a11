#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "rdspde/functional.hpp"
#include "rdspde/rng.hpp"
#include "rdspde/simulator.hpp"
#include "rdspde/stats.hpp"

namespace rdspde {

/// Monte Carlo estimate of <D P_t phi(x), h>.
struct GradientEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  double time = 0.0;
  SpectralField direction;

  Estimate as_estimate() const { return {mean, std_error, samples}; }
};

/// Stream block and worker count for a Monte Carlo run. Sample i uses
/// stream streams.at(i); nested estimators split the block.
struct SamplingOptions {
  StreamRange streams{};
  int workers = 1;
};

/// One Bismut-Elworthy-Li sample (1/t) phi(X(t)) sum_m <(-A)^{gamma/2} eta, dW>
/// from the fused path + variational integration on stream `stream`.
double bel_sample(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                  const SpectralField& h, double t, std::uint64_t stream);

/// Bismut-Elworthy-Li estimate of <D P^alpha_t phi(x), h> over `samples`
/// independent paths. Requires t > 0 and samples >= 2.
GradientEstimate bel_gradient(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                              const SpectralField& h, double t, std::size_t samples,
                              const SamplingOptions& options = {});

/// Central difference [phi(X(t, x + eps h)) - phi(X(t, x - eps h))] / (2 eps)
/// with both paths driven by the same noise.
GradientEstimate fd_gradient(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                             const SpectralField& h, double t, double eps, std::size_t samples,
                             const SamplingOptions& options = {});

/// P^alpha_t phi(x) = E phi(X(t, x)). Exact (zero stderr) at t = 0.
Estimate semigroup_apply(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x, double t,
                         std::size_t samples, const SamplingOptions& options = {});

/// P^alpha_t(<D phi(.), h>)(x), using the analytic gradient of phi.
Estimate semigroup_directional(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                               const SpectralField& h, double t, std::size_t samples,
                               const SamplingOptions& options = {});

struct IdentityBudget {
  std::size_t lhs_samples = 4000;
  std::size_t bel_samples = 4000;
  std::size_t outer_per_node = 2000;
  int quad_nodes = 8;
  /// Hard cap on simulated paths; exceeding it throws BudgetError.
  std::size_t max_paths = std::numeric_limits<std::size_t>::max();

  std::size_t paths_required() const;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Both sides of
///   P_t(<D phi, h>)(x) = <D P_t phi(x), h> - int_0^t P_{t-s}(<A h + p'_alpha(.) h, D P_s phi(.)>) ds
/// and their difference. The time integral uses Gauss-Legendre nodes on
/// (0, t); at each node an outer path to t - s is followed by one inner
/// Bismut-Elworthy-Li sample at time s (an unbiased nested estimator).
struct IdentityResidual {
  Estimate lhs;
  Estimate bel_term;
  Estimate integral_term;
  Estimate rhs;
  Estimate residual;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<Estimate> node_values;
  std::size_t paths_used = 0;
};

IdentityResidual identity_residual(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                                   const SpectralField& h, double t, const IdentityBudget& budget,
                                   const SamplingOptions& options = {});

/// A h + [p'_alpha(y) h]: the direction paired with D P_s phi in the identity.
SpectralField identity_direction(const Simulator& sim, const SpectralField& y, const SpectralField& h);

/// Default exponent beta: the midpoint of (gamma/2, 1/2), so that
/// gamma < 2 beta < 1.
double default_beta(double gamma);

/// K = ||(-A)^{(gamma - 2 beta)/2}|| = lambda_1^{(gamma - 2 beta)/2} for gamma < 2 beta.
double gradient_bound_constant(const SpectralBasis& basis, double gamma, double beta);

}  // namespace rdspde
