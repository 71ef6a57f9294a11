// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Criteria 3 to 9 read their verdicts from one run of the full
// desk suite; the rest are measured here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rdspde/config.hpp"
#include "rdspde/ergodic.hpp"
#include "rdspde/errors.hpp"
#include "rdspde/gradient.hpp"
#include "rdspde/report.hpp"
#include "rdspde/suite.hpp"

using namespace rdspde;

namespace {

using Clock = std::chrono::steady_clock;
using CF = CylindricalFunctional;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void emit(int id, const char* title, Verdict& v) {
  if (!v.pass) ++failures;
  std::printf("criterion %2d %s  %s:%s\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.str().c_str());
  std::fflush(stdout);
}

SpectralField mode(const SpectralBasis& b, int k, double a = 1.0) { return SpectralField::unit_mode(b, {k, 1, 1}, a); }

SpectralField smooth_field(const SpectralBasis& b, double scale, double decay) {
  SpectralField f(b);
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = scale * std::pow(-1.0, static_cast<double>(i)) / std::pow(static_cast<double>(i + 1), decay);
  return f;
}

void gaussian_baseline() {
  const auto start = Clock::now();
  Verdict v;
  SimConfig c;
  c.kmax = 16;
  c.poly = Polynomial::zero();
  c.seed = 101;
  const Simulator sim(c);
  const SpectralBasis& b = sim.basis();

  const InvariantEnsemble ens = sample_invariant(sim, default_burn_in(b), 10000, default_thinning(sim));
  const auto m = mode_second_moments(ens);
  const auto q = sim.stationary_variances();
  double max_z = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) max_z = std::max(max_z, std::abs(m[k].mean - q[k]) / m[k].std_error);
  v.detail << " var_1=" << m[0].mean << " (exact " << q[0] << "), max_z=" << max_z;
  v.require(max_z <= 3.0, "mode variance");
  v.require(std::abs(q[0] - 1.0 / (2.0 * M_PI * M_PI)) < 1e-15, "first-mode closed form");

  // Noise-free path equals the heat semigroup; with noise the mean does.
  const SpectralField x = smooth_field(b, 1.0, 1.0);
  const double t = 0.1;
  const std::vector<double> zero(sim.schedule(t).steps * b.mode_count(), 0.0);
  const double heat_err = (sim.simulate_path_with_noise(x, t, zero).final_state() - heat_semigroup(t, x)).norm();
  const SpectralField g = mode(b, 1) + mode(b, 2, 0.5);
  const Estimate mean = semigroup_apply(sim, CF::linear(g), x, t, 10000, {StreamRange{}.split(1, 8), 1});
  const double heat_exact = dot(heat_semigroup(t, x), g);
  v.detail << ", heat_err=" << heat_err << ", heat_mean_z=" << std::abs(mean.mean - heat_exact) / mean.std_error;
  v.require(heat_err < 1e-12, "noise-free heat flow");
  v.require(within_sigmas(mean.mean, heat_exact, mean.std_error), "heat-flow mean");

  const SpectralField h = mode(b, 1) + mode(b, 3, -0.7);
  const GradientEstimate bel = bel_gradient(sim, CF::linear(g), x, h, t, 10000, {StreamRange{}.split(2, 8), 1});
  const double bel_exact = dot(heat_semigroup(t, h), g);
  v.detail << ", bel_z=" << std::abs(bel.mean - bel_exact) / bel.std_error;
  v.require(within_sigmas(bel.mean, bel_exact, bel.std_error), "linear BEL gradient");

  IdentityBudget budget;
  budget.lhs_samples = 2000;
  budget.bel_samples = 2000;
  budget.outer_per_node = 500;
  const IdentityResidual id =
      identity_residual(sim, CF::sine(mode(b, 1)), x, h, 0.5, budget, {StreamRange{}.split(3, 8), 1});
  v.detail << ", identity_z=" << std::abs(id.residual.mean) / id.residual.std_error;
  v.require(within_sigmas(id.residual.mean, 0.0, id.residual.std_error), "identity residual");

  const double secs = seconds_since(start);
  v.detail << ", " << secs << " s";
  v.require(secs < 60.0, "runtime < 1 min");
  emit(1, "Gaussian baseline exactness", v);
}

void variational_flow() {
  const auto start = Clock::now();
  Verdict v;
  SimConfig c;
  c.kmax = 16;
  c.alpha = 0.1;
  c.seed = 202;
  const Simulator sim(c);
  const SpectralBasis& b = sim.basis();
  const double eps = 1e-5, t = 0.5;
  const std::size_t paths = 50;
  double worst = 0.0;
  for (std::size_t i = 0; i < paths; ++i) {
    RandomStream rng(c.seed, 1000 + i);
    SpectralField x(b), h(b);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = 2.0 * rng.normal() / static_cast<double>(k + 1);
      h[k] = rng.normal() / static_cast<double>(k + 1);
    }
    const PathSample base = sim.simulate_path(x, t, i);
    const SpectralField plus = sim.simulate_path_with_noise(x + eps * h, t, base.noise).final_state();
    const SpectralField minus = sim.simulate_path_with_noise(x - eps * h, t, base.noise).final_state();
    const SpectralField fd = (0.5 / eps) * (plus - minus);
    const SpectralField eta = sim.simulate_variational(base, h).eta(base.steps);
    worst = std::max(worst, (fd - eta).norm() / eta.norm());
  }
  const double secs = seconds_since(start);
  v.detail << " paths=" << paths << ", max_rel_l2=" << worst << ", " << secs << " s";
  v.require(worst < 1e-3, "relative error < 1e-3");
  v.require(secs < 60.0, "runtime < 1 min");
  emit(2, "variational flow vs coupled finite difference", v);
}

const CheckResult& result(const SuiteReport& r, const std::string& name) {
  for (const auto& c : r.results)
    if (c.name == name) return c;
  throw std::runtime_error("check missing from report: " + name);
}

void from_checks(int id, const char* title, const SuiteReport& r, const std::vector<std::string>& names,
                 double max_seconds, const std::vector<std::string>& shown) {
  Verdict v;
  double secs = 0.0;
  for (const auto& n : names) {
    const CheckResult& c = result(r, n);
    secs += c.wall_seconds;
    v.detail << " " << n << "=" << to_string(c.status);
    for (const auto& key : shown)
      if (!std::isnan(c.value(key))) v.detail << " " << key << "=" << c.value(key);
    v.require(c.status == CheckStatus::pass, n + ": " + c.message);
  }
  v.detail << ", " << secs << " s";
  if (max_seconds > 0) v.require(secs < max_seconds, "runtime");
  emit(id, title, v);
}

bool rejects(const std::string& yaml, const std::string& field) {
  try {
    parse_suite_config(yaml);
  } catch (const ConfigError& e) {
    return e.field() == field;
  }
  return false;
}

std::string sim_yaml(int dim, double gamma, const std::string& poly, double alpha = 0.1, double dt = 0.005) {
  std::ostringstream s;
  s << "version: 1\nsim:\n  dim: " << dim << "\n  kmax: 4\n  gamma: " << gamma << "\n  alpha: " << alpha
    << "\n  dt: " << dt << "\n  horizon: 0.5\n  seed: 1\n  poly: " << poly << "\nchecks: {}\n";
  return s.str();
}

void infrastructure(const SuiteReport& desk, double desk_seconds) {
  Verdict v;
  SuiteConfig smoke = load_suite_config(RDSPDE_CONFIG_DIR "/smoke.yaml");
  smoke.workers = 1;
  const std::string a = report_json(run_suite(smoke), false);
  smoke.workers = 2;
  const std::string b = report_json(run_suite(smoke), false);
  const std::string c = report_json(run_suite(smoke), false);
  v.detail << " smoke reports identical=" << (a == b && b == c ? "yes" : "no");
  v.require(a == b && b == c, "bit-identical reports");

  int rejected = 0, cases = 0;
  auto expect = [&](const std::string& yaml, const std::string& field) {
    ++cases;
    if (rejects(yaml, field)) ++rejected;
  };
  expect(sim_yaml(1, 1.0, "[0, 0, 0, -1]"), "sim.gamma");
  expect(sim_yaml(1, -0.5, "[0, 0, 0, -1]"), "sim.gamma");
  expect(sim_yaml(2, 0.0, "[0, 0, 0, -1]"), "sim.gamma");
  expect(sim_yaml(3, 0.5, "[0, 0, 0, -1]"), "sim.gamma");
  expect(sim_yaml(3, 1.2, "[0, 0, 0, -1]"), "sim.gamma");
  expect(sim_yaml(1, 0.0, "[0, 0, -1]"), "sim.poly");
  expect(sim_yaml(1, 0.0, "[0, 0, 0, 0, -1]"), "sim.poly");
  expect(sim_yaml(1, 0.0, "[0, 0, 0, 1]"), "sim.poly");
  expect(sim_yaml(1, 0.0, "[0, 1, 0, -1]"), "sim.poly");
  expect(sim_yaml(4, 0.5, "[0, 0, 0, -1]"), "sim.dim");
  expect(sim_yaml(1, 0.0, "[0, 0, 0, -1]", 0.0), "sim.alpha");
  expect(sim_yaml(1, 0.0, "[0, 0, 0, -1]", 0.1, 0.2), "sim.dt");
  v.detail << ", invalid configs rejected=" << rejected << "/" << cases;
  v.require(rejected == cases, "config validation");
  v.require(!rejects(sim_yaml(3, 0.6, "[0, 0, 0, -1]"), "sim.gamma"), "valid n=3 config accepted");

  v.detail << ", desk suite " << desk_seconds << " s with " << desk.count(CheckStatus::fail) << " failed checks";
  v.require(desk_seconds < 1800.0, "full suite < 30 min");
  v.require(desk.results.size() == check_registry().size(), "all checks attempted");
  v.require(desk.exit_code() == 0, "full suite exit code");
  emit(10, "infrastructure", v);
}

}  // namespace

int main() {
  try {
    gaussian_baseline();
    variational_flow();

    const auto start = Clock::now();
    const SuiteReport desk = run_suite(load_suite_config(RDSPDE_CONFIG_DIR "/desk.yaml"));
    const double desk_seconds = seconds_since(start);

    from_checks(3, "variational flow bounds", desk, {"variational_bounds"}, 120.0, {"sup_eta_max", "int_half_max"});
    from_checks(4, "interpolation inequality", desk, {"interpolation"}, 0.0, {"fields", "betas", "failures"});
    from_checks(5, "BEL vs finite difference", desk, {"bel_vs_fd"}, 300.0, {"max_z"});
    from_checks(6, "gradient identity residual", desk, {"gradient_identity"}, 600.0, {"max_z"});
    from_checks(7, "gradient bound scaling", desk, {"gradient_bound"}, 0.0, {"K", "max_scaled"});
    from_checks(8, "invariant-measure battery", desk, {"invariant_moments", "measure_convergence"}, 600.0,
                {"moment_N1_spread", "moment_N2_spread", "moment_N3_spread", "invariance_max_z"});
    from_checks(9, "integration by parts", desk, {"ibp_estimate", "ibp_gaussian"}, 0.0,
                {"ratio_max_over_min", "ratio_max_small_ah", "ratio_max_large_ah", "max_z"});
    infrastructure(desk, desk_seconds);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
