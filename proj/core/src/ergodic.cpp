#include "rdspde/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/sinh_sinh.hpp>

#include "rdspde/errors.hpp"
#include "rdspde/parallel.hpp"

namespace rdspde {

namespace {

double lambda_min(const SpectralBasis& basis) {
  const auto l = basis.eigenvalues();
  return *std::min_element(l.begin(), l.end());
}

struct BatteryEntry {
  std::string name;
  SnapshotFn fn;
};

std::vector<BatteryEntry> measure_battery(const SpectralBasis& basis) {
  const std::size_t second = basis.mode_count() > 1 ? 1 : 0;
  auto field_fn = [basis](int p) {
    return [basis, p](std::span<const double> c) {
      return lp_norm_power(SpectralField(basis, std::vector<double>(c.begin(), c.end())), p);
    };
  };
  return {
      {"norm_sq", [](std::span<const double> c) {
         double s = 0.0;
         for (double v : c) s += v * v;
         return s;
       }},
      {"lp4_pow4", field_fn(4)},
      {"cos_x1", [](std::span<const double> c) { return std::cos(c[0]); }},
      {"cos_2x1", [](std::span<const double> c) { return std::cos(2.0 * c[0]); }},
      {"cos_x1_plus_x2", [second](std::span<const double> c) { return std::cos(c[0] + c[second]); }},
      {"x1_sq", [](std::span<const double> c) { return c[0] * c[0]; }},
      {"x1_pow4", [](std::span<const double> c) { return c[0] * c[0] * c[0] * c[0]; }},
  };
}

Estimate series_estimate(std::span<const double> values) { return estimate_batch_means(values, 20); }

}  // namespace

std::span<const double> InvariantEnsemble::coeffs(std::size_t i) const {
  const std::size_t n = basis.mode_count();
  return std::span<const double>(data).subspan(i * n, n);
}

SpectralField InvariantEnsemble::snapshot(std::size_t i) const {
  const auto c = coeffs(i);
  return SpectralField(basis, std::vector<double>(c.begin(), c.end()));
}

double default_burn_in(const SpectralBasis& basis) { return 20.0 / lambda_min(basis); }

std::size_t default_thinning(const Simulator& sim) {
  const double relax = 1.0 / lambda_min(sim.basis());
  return static_cast<std::size_t>(std::max(1.0, std::ceil(relax / sim.config().dt - 1e-9)));
}

std::uint64_t ensemble_fingerprint(const SimConfig& cfg, double burn_in, std::size_t snapshots, std::size_t thinning,
                                   std::uint64_t stream) {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << cfg.dim << ";kmax=" << cfg.kmax << ";gamma=" << cfg.gamma << ";alpha=" << cfg.alpha
     << ";dt=" << cfg.dt << ";seed=" << cfg.seed << ";poly=";
  for (double a : cfg.poly.coefficients()) os << a << ',';
  os << ";burn_in=" << burn_in << ";snapshots=" << snapshots << ";thinning=" << thinning << ";stream=" << stream;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

InvariantEnsemble sample_invariant(const Simulator& sim, double burn_in, std::size_t n_snapshots,
                                   std::size_t thinning, std::uint64_t stream) {
  const SimConfig& cfg = sim.config();
  const double l1 = lambda_min(sim.basis());
  if (burn_in < 10.0 / l1 * (1.0 - 1e-12))
    throw DomainError("burn-in must cover at least 10 relaxation times (10 / lambda_1)");
  if (static_cast<double>(thinning) * cfg.dt < 1.0 / l1 * (1.0 - 1e-12))
    throw DomainError("thinning interval must be at least one relaxation time (1 / lambda_1)");
  if (n_snapshots < 100) throw DomainError("an invariant ensemble needs at least 100 snapshots");

  InvariantEnsemble ens{sim.basis(), {}, n_snapshots};
  ens.alpha = cfg.alpha;
  ens.burn_in = burn_in;
  ens.dt = cfg.dt;
  ens.thinning = thinning;
  ens.seed = cfg.seed;
  ens.stream = stream;
  ens.config_hash = ensemble_fingerprint(cfg, burn_in, n_snapshots, thinning, stream);

  const std::size_t modes = sim.basis().mode_count();
  ens.data.resize(n_snapshots * modes);
  std::vector<double> state(modes, 0.0);
  PathStepper stepper(sim, cfg.dt);
  RandomStream rng(cfg.seed, stream);
  const auto burn_steps = static_cast<std::size_t>(std::ceil(burn_in / cfg.dt - 1e-9));
  sim.advance(state, burn_steps, rng, stepper);
  for (std::size_t i = 0; i < n_snapshots; ++i) {
    sim.advance(state, thinning, rng, stepper);
    std::copy(state.begin(), state.end(), ens.data.begin() + static_cast<std::ptrdiff_t>(i * modes));
  }

  std::vector<double> sq(n_snapshots);
  for (std::size_t i = 0; i < n_snapshots; ++i) {
    double s = 0.0;
    for (double v : ens.coeffs(i)) s += v * v;
    sq[i] = s;
  }
  const std::size_t half = n_snapshots / 2;
  const Estimate first = estimate_batch_means(std::span<const double>(sq).first(half), 10);
  const Estimate second = estimate_batch_means(std::span<const double>(sq).subspan(half, half), 10);
  const double se = combined_std_error(first.std_error, second.std_error);
  ens.stationarity_z = se > 0.0 ? std::abs(first.mean - second.mean) / se : 0.0;
  ens.stationary = ens.stationarity_z < 3.0;
  return ens;
}

Estimate ensemble_average(const InvariantEnsemble& ens, const SnapshotFn& f) {
  std::vector<double> values(ens.count);
  for (std::size_t i = 0; i < ens.count; ++i) values[i] = f(ens.coeffs(i));
  return series_estimate(values);
}

Estimate ensemble_average(const InvariantEnsemble& ens, const CylindricalFunctional& phi) {
  return ensemble_average(ens, [&phi](std::span<const double> c) { return phi(c); });
}

std::vector<Estimate> mode_second_moments(const InvariantEnsemble& ens) {
  const std::size_t modes = ens.basis.mode_count();
  std::vector<Estimate> out;
  out.reserve(modes);
  for (std::size_t k = 0; k < modes; ++k)
    out.push_back(ensemble_average(ens, [k](std::span<const double> c) { return c[k] * c[k]; }));
  return out;
}

Estimate moment_l2N(const InvariantEnsemble& ens, int N) {
  if (N < 1) throw DomainError("moment degree N must be positive");
  const SpectralBasis basis = ens.basis;
  return ensemble_average(ens, [&basis, N](std::span<const double> c) {
    return lp_norm_power(SpectralField(basis, std::vector<double>(c.begin(), c.end())), 2 * N);
  });
}

std::vector<std::string> measure_battery_names() {
  std::vector<std::string> names;
  for (const auto& e : measure_battery(SpectralBasis(1, 1, 1))) names.push_back(e.name);
  return names;
}

std::vector<MeasureDistance> compare_measures(const InvariantEnsemble& a, const InvariantEnsemble& b) {
  if (!a.basis.same_as(b.basis)) throw DomainError("ensembles live on different bases");
  const bool paired = a.count == b.count && a.seed == b.seed && a.stream == b.stream && a.dt == b.dt &&
                      a.thinning == b.thinning && a.burn_in == b.burn_in;
  std::vector<MeasureDistance> out;
  for (const auto& entry : measure_battery(a.basis)) {
    MeasureDistance d;
    d.functional = entry.name;
    d.paired = paired;
    std::vector<double> va(a.count), vb(b.count);
    for (std::size_t i = 0; i < a.count; ++i) va[i] = entry.fn(a.coeffs(i));
    for (std::size_t i = 0; i < b.count; ++i) vb[i] = entry.fn(b.coeffs(i));
    const Estimate ea = series_estimate(va);
    const Estimate eb = series_estimate(vb);
    d.mean_a = ea.mean;
    d.mean_b = eb.mean;
    if (paired) {
      std::vector<double> diff(a.count);
      for (std::size_t i = 0; i < a.count; ++i) diff[i] = va[i] - vb[i];
      const Estimate ed = series_estimate(diff);
      d.distance = std::abs(ed.mean);
      d.std_error = ed.std_error;
    } else {
      d.distance = std::abs(ea.mean - eb.mean);
      d.std_error = combined_std_error(ea.std_error, eb.std_error);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<InvarianceResult> invariance_check(const Simulator& sim, const InvariantEnsemble& ens, double tau,
                                               const SamplingOptions& options) {
  if (!ens.basis.same_as(sim.basis())) throw DomainError("ensemble and simulator bases differ");
  if (!(tau > 0.0)) throw DomainError("invariance check needs tau > 0");
  const std::size_t modes = ens.basis.mode_count();
  InvariantEnsemble evolved = ens;
  parallel_for(ens.count, options.workers, [&](std::size_t i) {
    const SpectralField y = sim.final_state(ens.snapshot(i), tau, options.streams.at(i));
    std::copy(y.coeffs().begin(), y.coeffs().end(), evolved.data.begin() + static_cast<std::ptrdiff_t>(i * modes));
  });
  std::vector<InvarianceResult> out;
  for (const auto& entry : measure_battery(ens.basis)) {
    InvarianceResult r;
    r.functional = entry.name;
    r.before = ensemble_average(ens, entry.fn);
    r.after = ensemble_average(evolved, entry.fn);
    const double se = combined_std_error(r.before.std_error, r.after.std_error);
    r.z = se > 0.0 ? std::abs(r.after.mean - r.before.mean) / se : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

double gaussian_ibp_quadrature(const Simulator& sim, const CylindricalFunctional& phi, const SpectralField& h) {
  if (!sim.linear()) throw DomainError("the Gaussian integration-by-parts oracle needs p = 0");
  if (phi.directions().size() > 1) throw DomainError("quadrature oracle needs a single-direction functional");
  if (phi.directions().empty()) return 0.0;
  const SpectralField& g = phi.directions()[0];
  const auto lambda = sim.basis().eigenvalues();
  const auto q = sim.stationary_variances();
  // Y = <x, g> ~ N(0, s2); Z = v^h(x) is jointly Gaussian with Y and
  // E[Z | Y] = Cov(Z, Y) / s2 * Y.
  double s2 = 0.0, cov = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    s2 += q[k] * g[k] * g[k];
    cov += g[k] * h[k] / lambda[k];
  }
  if (s2 == 0.0) return 0.0;
  const double s = std::sqrt(s2);
  boost::math::quadrature::sinh_sinh<double> integrator;
  const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  const double moment = integrator.integrate(
      [&](double y) { return phi.profile(y) * y * norm * std::exp(-0.5 * y * y / s2); });
  return cov / s2 * moment;
}

IbpReport ibp_check(const Simulator& sim, const InvariantEnsemble& ens, const CylindricalFunctional& phi,
                    const SpectralField& h, std::optional<double> beta) {
  if (!ens.basis.same_as(sim.basis()) || !h.basis().same_as(sim.basis()))
    throw DomainError("ensemble, direction and simulator bases differ");
  IbpReport r;
  const Estimate lhs = ensemble_average(
      ens, [&](std::span<const double> c) { return phi.directional_derivative(c, h.coeffs()); });
  r.lhs = lhs.mean;
  r.lhs_std_error = lhs.std_error;
  const Estimate phi2 = ensemble_average(ens, [&](std::span<const double> c) {
    const double v = phi(c);
    return v * v;
  });
  r.phi_l2 = std::sqrt(std::max(0.0, phi2.mean));
  r.phi_l2_std_error = r.phi_l2 > 0.0 ? phi2.std_error / (2.0 * r.phi_l2) : 0.0;
  r.h_norm = h.norm();
  r.ah_norm = apply_laplacian(h).norm();
  if (!sim.linear()) {
    const Estimate ph2 = ensemble_average(ens, [&](std::span<const double> c) {
      const SpectralField x(ens.basis, std::vector<double>(c.begin(), c.end()));
      const SpectralField d = identity_direction(sim, x, h) - apply_laplacian(h);
      return d.norm() * d.norm();
    });
    r.ph_l2 = std::sqrt(std::max(0.0, ph2.mean));
  }
  r.beta = beta.value_or(default_beta(sim.config().gamma));
  r.k_const = gradient_bound_constant(sim.basis(), sim.config().gamma, r.beta);
  r.rhs_bound = r.k_const * r.phi_l2 * r.h_norm +
                2.0 * r.k_const / (1.0 - 2.0 * r.beta) * r.phi_l2 * (r.ah_norm + r.ph_l2);
  const double denom = r.phi_l2 * r.ah_norm;
  r.ratio = denom > 0.0 ? r.lhs / denom : 0.0;

  if (sim.linear()) {
    GaussianIbp g;
    const SpectralField k = apply_fractional(-1.0, h);
    const Estimate glhs = ensemble_average(
        ens, [&](std::span<const double> c) { return phi.directional_derivative(c, k.coeffs()); });
    g.lhs = glhs.mean;
    g.lhs_std_error = glhs.std_error;
    const auto lambda = sim.basis().eigenvalues();
    const double gamma = sim.config().gamma;
    std::vector<double> vh(h.size());
    for (std::size_t i = 0; i < vh.size(); ++i) vh[i] = 2.0 * std::pow(lambda[i], gamma) * h[i];
    const Estimate grhs = ensemble_average(ens, [&](std::span<const double> c) {
      double v = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) v += vh[i] * c[i];
      return phi(c) * v;
    });
    g.rhs_monte_carlo = grhs.mean;
    g.rhs_mc_std_error = grhs.std_error;
    if (phi.directions().size() <= 1) {
      g.has_quadrature = true;
      g.rhs_quadrature = gaussian_ibp_quadrature(sim, phi, h);
    }
    r.gaussian = g;
  }
  return r;
}

}  // namespace rdspde
