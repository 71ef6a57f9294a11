#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rdspde/nonlinearity.hpp"
#include "rdspde/rng.hpp"
#include "rdspde/spectral.hpp"

namespace rdspde {

/// Model and discretization parameters of
///   dX = [A X + p_alpha(X)] dt + (-A)^{-gamma/2} dW  on [0,1]^dim.
struct SimConfig {
  static constexpr double kStabilityCap = 0.5;

  int dim = 1;
  int kmax = 32;
  double gamma = 0.0;
  double alpha = 0.1;
  double dt = 0.005;
  double horizon = 0.5;
  std::uint64_t seed = 1;
  Polynomial poly = Polynomial::negative_cubic();

  /// Throws ConfigError naming the violated constraint: dim in {1,2,3},
  /// dim/2 - 1 < gamma < 1, alpha > 0, dt > 0, horizon >= dt and
  /// dt / alpha <= kStabilityCap when p is nonzero.
  void validate() const;

  /// Basis with the dealiased grid for this polynomial degree.
  SpectralBasis make_basis() const;
};

/// Uniform step count and size covering [0, t].
struct Schedule {
  std::size_t steps = 0;
  double dt = 0.0;
  double horizon() const { return dt * static_cast<double>(steps); }
};

/// One trajectory X_alpha(t_m, x) with the unit normals that drove it and the
/// pointwise slope p'_alpha(X_m) on the grid (reused by the variational flow).
struct PathSample {
  SpectralBasis basis;
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> states;  // (steps + 1) x modes
  std::vector<double> noise;   // steps x modes, unit normals before coloring
  std::vector<double> slopes;  // steps x grid points

  double time(std::size_t m) const { return dt * static_cast<double>(m); }
  std::span<const double> state_coeffs(std::size_t m) const;
  SpectralField state(std::size_t m) const;
  SpectralField final_state() const { return state(steps); }
  std::span<const double> unit_noise(std::size_t m) const;
  /// sqrt(dt) * unit noise: the cylindrical Wiener increment over step m.
  std::vector<double> wiener_increment(std::size_t m) const;
  std::span<const double> slope(std::size_t m) const;
};

/// eta^h(t_m, x): derivative of the discrete flow in direction h.
struct VariationalPath {
  SpectralBasis basis;
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> etas;  // (steps + 1) x modes

  double time(std::size_t m) const { return dt * static_cast<double>(m); }
  std::span<const double> eta_coeffs(std::size_t m) const;
  SpectralField eta(std::size_t m) const;
};

/// Upper bound on the stochastic-convolution variance q(t, xi).
struct CovarianceBound {
  double truncated = 0.0;  // sup over t, xi of the truncated series
  double tail = 0.0;       // integral bound on the discarded modes
  double total() const { return truncated + tail; }
};

class Simulator;

/// Exponential-Euler step kernel for a fixed step size. Per mode k:
///   X_{m+1} = e^{-l dt} X_m + (1 - e^{-l dt})/l [p_alpha(X_m)]_k + l^{-gamma/2} s_k(dt) z_{m,k}
/// with s_k(dt)^2 = (1 - e^{-2 l dt}) / (2 l), the exact Ornstein-Uhlenbeck
/// increment. The nonlinearity is evaluated pointwise on the grid and
/// projected back. Holds scratch buffers: one stepper per task.
class PathStepper {
 public:
  PathStepper(const Simulator& sim, double dt);

  double dt() const noexcept { return dt_; }

  /// Advances x by one step driven by unit normals z. Writes p'_alpha(X_m)
  /// on the grid into `slopes` when it is non-empty.
  void step(std::span<double> x, std::span<const double> z, std::span<double> slopes);

  /// eta <- e^{-l dt} eta + (1 - e^{-l dt})/l [p'_alpha(X_m) eta]_k, the exact
  /// linearization of `step`.
  void step_variation(std::span<double> eta, std::span<const double> slopes);

  /// Contribution of one step to sum_m <(-A)^{gamma/2} eta, dW>, with the
  /// step-propagated eta_{m+1} (known at t_m) and the step's unit normals.
  /// Weighting by dt / s_k(dt) makes the discrete Bismut-Elworthy-Li weight
  /// the exact derivative of the discrete semigroup.
  double bel_increment(std::span<const double> eta_next, std::span<const double> z) const;

 private:
  const Simulator* sim_;
  double dt_;
  std::vector<double> decay_, gain_, noise_, bel_;
  std::vector<double> grid_, react_;
};

class Simulator {
 public:
  /// Validates the configuration.
  explicit Simulator(SimConfig cfg);

  const SimConfig& config() const noexcept { return cfg_; }
  const SpectralBasis& basis() const noexcept { return basis_; }
  const YosidaApprox& yosida() const noexcept { return yosida_; }
  bool linear() const noexcept { return cfg_.poly.is_zero(); }

  /// ceil(t / dt) uniform steps ending exactly at t.
  Schedule schedule(double t) const;

  PathSample simulate_path(const SpectralField& x0, std::uint64_t stream) const;
  PathSample simulate_path(const SpectralField& x0, double t, std::uint64_t stream) const;
  /// Same scheme driven by caller-supplied unit normals (steps x modes).
  PathSample simulate_path_with_noise(const SpectralField& x0, double t, std::span<const double> noise) const;

  /// X(t) only, without storing the path.
  SpectralField final_state(const SpectralField& x0, double t, std::uint64_t stream) const;

  /// Advances `state` in place by `steps` steps of size config().dt.
  void advance(std::span<double> state, std::size_t steps, RandomStream& rng, PathStepper& stepper) const;

  VariationalPath simulate_variational(const PathSample& path, const SpectralField& h) const;

  /// (1/t) sum_m <(-A)^{gamma/2} eta, dW> for a path and its variational flow.
  double bel_weight(const PathSample& path, const VariationalPath& var) const;

  /// Exact draw of W_A(t) = int_0^t (-A)^{-gamma/2} e^{(t-s)A} dW(s).
  SpectralField sample_stochastic_convolution(double t, std::uint64_t stream) const;

  /// Variance of W_A(t, xi) summed over the retained modes.
  double covariance_q(double t, std::span<const double> xi) const;
  CovarianceBound covariance_bound() const;

  /// Per-mode stationary variance of the linear (p = 0) dynamics,
  /// lambda_k^{-1-gamma} / 2.
  std::vector<double> stationary_variances() const;

 private:
  friend class PathStepper;
  SimConfig cfg_;
  SpectralBasis basis_;
  YosidaApprox yosida_;
};

}  // namespace rdspde
