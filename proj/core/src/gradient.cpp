#include "rdspde/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rdspde/errors.hpp"
#include "rdspde/parallel.hpp"
#include "rdspde/quadrature.hpp"

namespace rdspde {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("quadrature needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const auto idx = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[idx] = mid + half * z;
    rule.weights[idx] = 2.0 * half / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

namespace {

void require_same_basis(const Simulator& sim, const SpectralField& f, const char* what) {
  if (!f.basis().same_as(sim.basis())) throw DomainError(std::string(what) + " lives on a different basis");
}

GradientEstimate make_gradient(const std::vector<double>& values, double t, const SpectralField& h) {
  const Estimate e = estimate_mean(values);
  return GradientEstimate{e.mean, e.std_error, e.samples, t, h};
}

}  // namespace

double bel_sample(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                  const SpectralField& h, double t, std::uint64_t stream) {
  const Schedule sched = sim.schedule(t);
  if (sched.steps == 0) throw DomainError("Bismut-Elworthy-Li estimate needs t > 0");
  const std::size_t modes = sim.basis().mode_count();
  PathStepper stepper(sim, sched.dt);
  RandomStream rng(sim.config().seed, stream);
  std::vector<double> state(x.coeffs().begin(), x.coeffs().end());
  std::vector<double> eta(h.coeffs().begin(), h.coeffs().end());
  std::vector<double> z(modes), slopes(sim.basis().point_count());
  double integral = 0.0;
  for (std::size_t m = 0; m < sched.steps; ++m) {
    rng.fill_normal(z);
    stepper.step(state, z, slopes);
    stepper.step_variation(eta, slopes);
    integral += stepper.bel_increment(eta, z);
  }
  for (double v : state)
    if (!std::isfinite(v)) throw BlowUpError(sched.steps, t);
  return phi(state) * integral / t;
}

GradientEstimate bel_gradient(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                              const SpectralField& h, double t, std::size_t samples,
                              const SamplingOptions& options) {
  if (!(t > 0.0)) throw DomainError("Bismut-Elworthy-Li estimate needs t > 0");
  if (samples < 2) throw DomainError("need at least 2 samples");
  require_same_basis(sim, x, "initial condition");
  require_same_basis(sim, h, "direction");
  std::vector<double> values(samples);
  parallel_for(samples, options.workers,
               [&](std::size_t i) { values[i] = bel_sample(sim, phi, x, h, t, options.streams.at(i)); });
  return make_gradient(values, t, h);
}

GradientEstimate fd_gradient(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                             const SpectralField& h, double t, double eps, std::size_t samples,
                             const SamplingOptions& options) {
  if (!(eps > 0.0)) throw DomainError("finite-difference step must be positive");
  if (samples < 2) throw DomainError("need at least 2 samples");
  require_same_basis(sim, x, "initial condition");
  require_same_basis(sim, h, "direction");
  const SpectralField plus = x + eps * h;
  const SpectralField minus = x - eps * h;
  std::vector<double> values(samples);
  parallel_for(samples, options.workers, [&](std::size_t i) {
    const std::uint64_t stream = options.streams.at(i);
    const SpectralField xp = sim.final_state(plus, t, stream);
    const SpectralField xm = sim.final_state(minus, t, stream);
    values[i] = (phi(xp) - phi(xm)) / (2.0 * eps);
  });
  return make_gradient(values, t, h);
}

Estimate semigroup_apply(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x, double t,
                         std::size_t samples, const SamplingOptions& options) {
  require_same_basis(sim, x, "initial condition");
  if (t == 0.0) return Estimate{phi(x), 0.0, samples};
  if (samples < 2) throw DomainError("need at least 2 samples");
  std::vector<double> values(samples);
  parallel_for(samples, options.workers,
               [&](std::size_t i) { values[i] = phi(sim.final_state(x, t, options.streams.at(i))); });
  return estimate_mean(values);
}

Estimate semigroup_directional(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                               const SpectralField& h, double t, std::size_t samples,
                               const SamplingOptions& options) {
  require_same_basis(sim, x, "initial condition");
  require_same_basis(sim, h, "direction");
  if (t == 0.0) return Estimate{phi.directional_derivative(x.coeffs(), h.coeffs()), 0.0, samples};
  if (samples < 2) throw DomainError("need at least 2 samples");
  std::vector<double> values(samples);
  parallel_for(samples, options.workers, [&](std::size_t i) {
    const SpectralField y = sim.final_state(x, t, options.streams.at(i));
    values[i] = phi.directional_derivative(y.coeffs(), h.coeffs());
  });
  return estimate_mean(values);
}

SpectralField identity_direction(const Simulator& sim, const SpectralField& y, const SpectralField& h) {
  SpectralField d = apply_laplacian(h);
  if (sim.linear()) return d;
  const SpectralBasis& basis = sim.basis();
  std::vector<double> ygrid = to_grid(y);
  std::vector<double> hgrid = to_grid(h);
  for (std::size_t j = 0; j < ygrid.size(); ++j) hgrid[j] *= sim.yosida().derivative(ygrid[j]);
  return d + from_grid(basis, hgrid);
}

std::size_t IdentityBudget::paths_required() const {
  return lhs_samples + bel_samples + 2 * outer_per_node * static_cast<std::size_t>(std::max(0, quad_nodes));
}

IdentityResidual identity_residual(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& x,
                                   const SpectralField& h, double t, const IdentityBudget& budget,
                                   const SamplingOptions& options) {
  require_same_basis(sim, x, "initial condition");
  require_same_basis(sim, h, "direction");
  if (!(t > 0.0)) throw DomainError("identity residual needs t > 0");
  if (budget.quad_nodes < 1 || budget.outer_per_node < 2 || budget.lhs_samples < 2 || budget.bel_samples < 2)
    throw DomainError("identity residual budget too small");
  if (budget.paths_required() > budget.max_paths)
    throw BudgetError("nested budget exhausted: " + std::to_string(budget.paths_required()) + " paths needed, " +
                      std::to_string(budget.max_paths) + " allowed");

  const auto nodes = static_cast<std::uint64_t>(budget.quad_nodes);
  const std::uint64_t parts = 2 + 2 * nodes;
  IdentityResidual out;
  out.lhs = semigroup_directional(sim, phi, x, h, t, budget.lhs_samples,
                                  {options.streams.split(0, parts), options.workers});
  out.bel_term = bel_gradient(sim, phi, x, h, t, budget.bel_samples, {options.streams.split(1, parts), options.workers})
                     .as_estimate();

  const QuadratureRule rule = gauss_legendre(budget.quad_nodes, 0.0, t);
  out.nodes = rule.nodes;
  out.weights = rule.weights;
  double integral = 0.0, variance = 0.0;
  for (std::uint64_t i = 0; i < nodes; ++i) {
    const double s = rule.nodes[i];
    const StreamRange outer = options.streams.split(2 + 2 * i, parts);
    const StreamRange inner = options.streams.split(3 + 2 * i, parts);
    std::vector<double> values(budget.outer_per_node);
    parallel_for(values.size(), options.workers, [&](std::size_t j) {
      const SpectralField y = sim.final_state(x, t - s, outer.at(j));
      const SpectralField d = identity_direction(sim, y, h);
      values[j] = bel_sample(sim, phi, y, d, s, inner.at(j));
    });
    const Estimate e = estimate_mean(values);
    out.node_values.push_back(e);
    integral += rule.weights[i] * e.mean;
    variance += rule.weights[i] * rule.weights[i] * e.std_error * e.std_error;
  }
  out.integral_term = Estimate{integral, std::sqrt(variance), budget.outer_per_node * nodes};
  out.rhs = difference(out.bel_term, out.integral_term);
  out.residual = difference(out.lhs, out.rhs);
  out.paths_used = budget.paths_required();
  return out;
}

double default_beta(double gamma) { return 0.5 * (std::max(0.0, 0.5 * gamma) + 0.5); }

double gradient_bound_constant(const SpectralBasis& basis, double gamma, double beta) {
  if (!(gamma < 2.0 * beta)) throw DomainError("gradient bound needs gamma < 2 beta");
  const auto lambda = basis.eigenvalues();
  const double lambda_min = *std::min_element(lambda.begin(), lambda.end());
  return std::pow(lambda_min, 0.5 * (gamma - 2.0 * beta));
}

}  // namespace rdspde
