#include "rdspde/simulator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

bool finite_span(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void SimConfig::validate() const {
  if (dim < 1 || dim > 3) throw ConfigError("dim", "spatial dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  if (kmax < 1) throw ConfigError("kmax", "mode cutoff must be a positive integer");
  const double lower = 0.5 * dim - 1.0;
  if (!(gamma > lower && gamma < 1.0))
    throw ConfigError("gamma", "gamma = " + fmt_double(gamma) + " violates dim/2 - 1 < gamma < 1, i.e. " +
                                   fmt_double(lower) + " < gamma < 1 for dim = " + std::to_string(dim));
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha", "Yosida parameter must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "time step must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw ConfigError("horizon", "horizon must be at least dt");
  if (!poly.is_zero() && dt / alpha > kStabilityCap)
    throw ConfigError("dt", "dt / alpha = " + fmt_double(dt / alpha) + " exceeds the stability cap " +
                                fmt_double(kStabilityCap) + " (Lipschitz bound of p_alpha is 1/alpha)");
}

SpectralBasis SimConfig::make_basis() const { return SpectralBasis::dealiased(dim, kmax, poly.degree()); }

// ---------------------------------------------------------------------------

std::span<const double> PathSample::state_coeffs(std::size_t m) const {
  const std::size_t n = basis.mode_count();
  return std::span<const double>(states).subspan(m * n, n);
}

SpectralField PathSample::state(std::size_t m) const {
  const auto c = state_coeffs(m);
  return SpectralField(basis, std::vector<double>(c.begin(), c.end()));
}

std::span<const double> PathSample::unit_noise(std::size_t m) const {
  const std::size_t n = basis.mode_count();
  return std::span<const double>(noise).subspan(m * n, n);
}

std::vector<double> PathSample::wiener_increment(std::size_t m) const {
  const auto z = unit_noise(m);
  std::vector<double> out(z.begin(), z.end());
  const double s = std::sqrt(dt);
  for (double& v : out) v *= s;
  return out;
}

std::span<const double> PathSample::slope(std::size_t m) const {
  const std::size_t n = basis.point_count();
  return std::span<const double>(slopes).subspan(m * n, n);
}

std::span<const double> VariationalPath::eta_coeffs(std::size_t m) const {
  const std::size_t n = basis.mode_count();
  return std::span<const double>(etas).subspan(m * n, n);
}

SpectralField VariationalPath::eta(std::size_t m) const {
  const auto c = eta_coeffs(m);
  return SpectralField(basis, std::vector<double>(c.begin(), c.end()));
}

// ---------------------------------------------------------------------------

PathStepper::PathStepper(const Simulator& sim, double dt) : sim_(&sim), dt_(dt) {
  if (!(dt > 0.0)) throw DomainError("step size must be positive");
  const auto lambda = sim.basis().eigenvalues();
  const double gamma = sim.config().gamma;
  const std::size_t n = lambda.size();
  decay_.resize(n);
  gain_.resize(n);
  noise_.resize(n);
  bel_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double l = lambda[k];
    decay_[k] = std::exp(-l * dt);
    gain_[k] = -std::expm1(-l * dt) / l;
    const double sigma = std::sqrt(-std::expm1(-2.0 * l * dt) / (2.0 * l));
    noise_[k] = std::pow(l, -0.5 * gamma) * sigma;
    bel_[k] = dt * std::pow(l, 0.5 * gamma) / sigma;
  }
  grid_.resize(sim.basis().point_count());
  react_.resize(n);
}

void PathStepper::step(std::span<double> x, std::span<const double> z, std::span<double> slopes) {
  const std::size_t n = decay_.size();
  if (sim_->linear()) {
    for (std::size_t k = 0; k < n; ++k) x[k] = decay_[k] * x[k] + noise_[k] * z[k];
    if (!slopes.empty()) std::fill(slopes.begin(), slopes.end(), 0.0);
    return;
  }
  const SpectralBasis& basis = sim_->basis();
  const YosidaApprox& yosida = sim_->yosida();
  basis.to_grid(x, grid_);
  if (slopes.empty()) {
    for (double& v : grid_) v = yosida.value(v);
  } else {
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      const auto pt = yosida.evaluate(grid_[j]);
      grid_[j] = pt.value;
      slopes[j] = pt.derivative;
    }
  }
  basis.from_grid(grid_, react_);
  for (std::size_t k = 0; k < n; ++k) x[k] = decay_[k] * x[k] + gain_[k] * react_[k] + noise_[k] * z[k];
}

void PathStepper::step_variation(std::span<double> eta, std::span<const double> slopes) {
  const std::size_t n = decay_.size();
  if (sim_->linear()) {
    for (std::size_t k = 0; k < n; ++k) eta[k] *= decay_[k];
    return;
  }
  const SpectralBasis& basis = sim_->basis();
  basis.to_grid(eta, grid_);
  for (std::size_t j = 0; j < grid_.size(); ++j) grid_[j] *= slopes[j];
  basis.from_grid(grid_, react_);
  for (std::size_t k = 0; k < n; ++k) eta[k] = decay_[k] * eta[k] + gain_[k] * react_[k];
}

double PathStepper::bel_increment(std::span<const double> eta_next, std::span<const double> z) const {
  double s = 0.0;
  for (std::size_t k = 0; k < bel_.size(); ++k) s += bel_[k] * eta_next[k] * z[k];
  return s;
}

// ---------------------------------------------------------------------------

namespace {

SimConfig validated(SimConfig cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Simulator::Simulator(SimConfig cfg)
    : cfg_(validated(std::move(cfg))), basis_(cfg_.make_basis()), yosida_(cfg_.poly, cfg_.alpha) {}

Schedule Simulator::schedule(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and nonnegative");
  if (t == 0.0) return {};
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t / cfg_.dt - 1e-9)));
  return {steps, t / static_cast<double>(steps)};
}

PathSample Simulator::simulate_path(const SpectralField& x0, std::uint64_t stream) const {
  return simulate_path(x0, cfg_.horizon, stream);
}

PathSample Simulator::simulate_path(const SpectralField& x0, double t, std::uint64_t stream) const {
  const Schedule sched = schedule(t);
  std::vector<double> noise(sched.steps * basis_.mode_count());
  RandomStream rng(cfg_.seed, stream);
  rng.fill_normal(noise);
  return simulate_path_with_noise(x0, t, noise);
}

PathSample Simulator::simulate_path_with_noise(const SpectralField& x0, double t,
                                               std::span<const double> noise) const {
  if (!x0.basis().same_as(basis_)) throw DomainError("initial condition lives on a different basis");
  const Schedule sched = schedule(t);
  const std::size_t modes = basis_.mode_count();
  const std::size_t points = basis_.point_count();
  if (noise.size() != sched.steps * modes) throw DomainError("noise array has the wrong shape");

  PathSample path{basis_, sched.dt, sched.steps, {}, {}, {}};
  path.states.resize((sched.steps + 1) * modes);
  path.noise.assign(noise.begin(), noise.end());
  path.slopes.resize(sched.steps * points);
  std::copy(x0.coeffs().begin(), x0.coeffs().end(), path.states.begin());
  if (sched.steps == 0) return path;

  PathStepper stepper(*this, sched.dt);
  std::vector<double> x(x0.coeffs().begin(), x0.coeffs().end());
  for (std::size_t m = 0; m < sched.steps; ++m) {
    stepper.step(x, noise.subspan(m * modes, modes), std::span<double>(path.slopes).subspan(m * points, points));
    if (!finite_span(x)) throw BlowUpError(m + 1, path.time(m + 1));
    std::copy(x.begin(), x.end(), path.states.begin() + static_cast<std::ptrdiff_t>((m + 1) * modes));
  }
  return path;
}

SpectralField Simulator::final_state(const SpectralField& x0, double t, std::uint64_t stream) const {
  if (!x0.basis().same_as(basis_)) throw DomainError("initial condition lives on a different basis");
  const Schedule sched = schedule(t);
  SpectralField x = x0;
  if (sched.steps == 0) return x;
  PathStepper stepper(*this, sched.dt);
  RandomStream rng(cfg_.seed, stream);
  std::vector<double> z(basis_.mode_count());
  for (std::size_t m = 0; m < sched.steps; ++m) {
    rng.fill_normal(z);
    stepper.step(x.coeffs(), z, {});
    if (!x.all_finite()) throw BlowUpError(m + 1, sched.dt * static_cast<double>(m + 1));
  }
  return x;
}

void Simulator::advance(std::span<double> state, std::size_t steps, RandomStream& rng, PathStepper& stepper) const {
  std::vector<double> z(basis_.mode_count());
  for (std::size_t m = 0; m < steps; ++m) {
    rng.fill_normal(z);
    stepper.step(state, z, {});
    if (!finite_span(state)) throw BlowUpError(m + 1, stepper.dt() * static_cast<double>(m + 1));
  }
}

VariationalPath Simulator::simulate_variational(const PathSample& path, const SpectralField& h) const {
  if (!h.basis().same_as(basis_) || !path.basis.same_as(basis_))
    throw DomainError("direction and path must live on the simulator basis");
  const std::size_t modes = basis_.mode_count();
  VariationalPath out{basis_, path.dt, path.steps, {}};
  out.etas.resize((path.steps + 1) * modes);
  std::copy(h.coeffs().begin(), h.coeffs().end(), out.etas.begin());
  if (path.steps == 0) return out;

  PathStepper stepper(*this, path.dt);
  std::vector<double> eta(h.coeffs().begin(), h.coeffs().end());
  for (std::size_t m = 0; m < path.steps; ++m) {
    stepper.step_variation(eta, path.slope(m));
    if (!finite_span(eta)) throw BlowUpError(m + 1, path.time(m + 1));
    std::copy(eta.begin(), eta.end(), out.etas.begin() + static_cast<std::ptrdiff_t>((m + 1) * modes));
  }
  return out;
}

double Simulator::bel_weight(const PathSample& path, const VariationalPath& var) const {
  if (path.steps == 0) throw DomainError("Bismut-Elworthy-Li weight needs t > 0");
  PathStepper stepper(*this, path.dt);
  double sum = 0.0;
  for (std::size_t m = 0; m < path.steps; ++m) sum += stepper.bel_increment(var.eta_coeffs(m + 1), path.unit_noise(m));
  return sum / path.time(path.steps);
}

SpectralField Simulator::sample_stochastic_convolution(double t, std::uint64_t stream) const {
  if (!(t >= 0.0)) throw DomainError("stochastic convolution needs t >= 0");
  SpectralField w(basis_);
  if (t == 0.0) return w;
  RandomStream rng(cfg_.seed, stream);
  const auto lambda = basis_.eigenvalues();
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double l = lambda[k];
    const double var = std::pow(l, -cfg_.gamma) * (-std::expm1(-2.0 * l * t)) / (2.0 * l);
    w[k] = std::sqrt(var) * rng.normal();
  }
  return w;
}

double Simulator::covariance_q(double t, std::span<const double> xi) const {
  if (!(t >= 0.0)) throw DomainError("covariance needs t >= 0");
  for (int i = 0; i < cfg_.dim; ++i)
    if (!(xi[static_cast<std::size_t>(i)] > 0.0 && xi[static_cast<std::size_t>(i)] < 1.0))
      throw DomainError("covariance point must be interior");
  const auto lambda = basis_.eigenvalues();
  double q = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    const double l = lambda[k];
    const double e = basis_.basis_function(k, xi);
    q += -std::expm1(-2.0 * l * t) * std::pow(l, -1.0 - cfg_.gamma) / 2.0 * e * e;
  }
  return q;
}

CovarianceBound Simulator::covariance_bound() const {
  const auto lambda = basis_.eigenvalues();
  const double sup_e2 = std::pow(2.0, cfg_.dim);
  CovarianceBound b;
  for (double l : lambda) b.truncated += std::pow(l, -1.0 - cfg_.gamma) / 2.0 * sup_e2;
  // Modes with |k|_inf > kmax: each lattice point dominates |y|^{-s} on its
  // unit cell, and those cells lie outside the ball of radius kmax.
  const double s = 2.0 + 2.0 * cfg_.gamma;
  const int n = cfg_.dim;
  const double sphere = n == 1 ? 2.0 : (n == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
  const double lattice_tail = sphere / std::pow(2.0, n) * std::pow(cfg_.kmax, n - s) / (s - n);
  b.tail = sup_e2 / 2.0 * std::pow(std::numbers::pi, -s) * lattice_tail;
  return b;
}

std::vector<double> Simulator::stationary_variances() const {
  const auto lambda = basis_.eigenvalues();
  std::vector<double> out(lambda.size());
  for (std::size_t k = 0; k < lambda.size(); ++k) out[k] = std::pow(lambda[k], -1.0 - cfg_.gamma) / 2.0;
  return out;
}

}  // namespace rdspde
