#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rdspde/errors.hpp"
#include "rdspde/simulator.hpp"
#include "rdspde/stats.hpp"

using namespace rdspde;

namespace {

constexpr double kPi = std::numbers::pi;

SimConfig linear_config(int kmax = 16) {
  SimConfig c;
  c.kmax = kmax;
  c.poly = Polynomial::zero();
  return c;
}

SimConfig cubic_config(int kmax = 16) {
  SimConfig c;
  c.kmax = kmax;
  return c;
}

SpectralField test_field(const SpectralBasis& b, double scale) {
  SpectralField f(b);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = scale * std::cos(1.3 * static_cast<double>(k)) / (1.0 + k);
  return f;
}

// Unit normals of the 2h scheme implied by two h-steps of OU noise.
std::vector<double> coarsen_noise(const SpectralBasis& b, std::span<const double> fine, double h) {
  const std::size_t modes = b.mode_count();
  const std::size_t steps = fine.size() / modes / 2;
  std::vector<double> out(steps * modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double l = b.eigenvalue(k);
    const double sh = std::sqrt(-std::expm1(-2.0 * l * h) / (2.0 * l));
    const double s2h = std::sqrt(-std::expm1(-4.0 * l * h) / (2.0 * l));
    for (std::size_t m = 0; m < steps; ++m)
      out[m * modes + k] = (std::exp(-l * h) * sh * fine[2 * m * modes + k] + sh * fine[(2 * m + 1) * modes + k]) / s2h;
  }
  return out;
}

}  // namespace

TEST(SimConfig, NoiseExponentRange) {
  SimConfig c;
  c.dim = 3;
  c.kmax = 4;
  c.gamma = 0.4;
  EXPECT_THROW(c.validate(), ConfigError);
  c.gamma = 0.6;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  SimConfig d;
  d.gamma = 0.0;
  EXPECT_NO_THROW(d.validate());
  d.gamma = -0.5;
  EXPECT_THROW(d.validate(), ConfigError);
}

TEST(SimConfig, StabilityCap) {
  SimConfig c;
  c.alpha = 0.01;
  c.dt = 0.01;
  try {
    c.validate();
    FAIL() << "expected a stability-cap error";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "dt");
  }
  c.poly = Polynomial::zero();
  EXPECT_NO_THROW(c.validate());
}

TEST(Simulator, FrozenNoiseLinearIsHeatFlow) {
  const Simulator sim(linear_config());
  const SpectralField x = test_field(sim.basis(), 1.0);
  const auto steps = sim.schedule(0.3).steps;
  const std::vector<double> zero(steps * sim.basis().mode_count(), 0.0);
  const PathSample path = sim.simulate_path_with_noise(x, 0.3, zero);
  const SpectralField exact = heat_semigroup(0.3, x);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(path.final_state()[k], exact[k], 1e-14);
}

TEST(Simulator, StatesStartAtInitialConditionAndAreReproducible) {
  const Simulator sim(cubic_config());
  const SpectralField x = test_field(sim.basis(), 2.0);
  const PathSample a = sim.simulate_path(x, 0.2, 5);
  const PathSample b = sim.simulate_path(x, 0.2, 5);
  const PathSample c = sim.simulate_path(x, 0.2, 6);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(a.state(0)[k], x[k]);
  EXPECT_EQ(a.states, b.states);
  EXPECT_NE(a.states, c.states);
  const SpectralField f = sim.final_state(x, 0.2, 5);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(f[k], a.final_state()[k]);
}

TEST(Simulator, UnitNoiseHasUnitVariance) {
  const Simulator sim(linear_config(8));
  const PathSample p = sim.simulate_path(SpectralField(sim.basis()), 10.0, 1);
  std::vector<double> sq(p.noise.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = p.noise[i] * p.noise[i];
  const Estimate e = estimate_mean(sq);
  EXPECT_TRUE(within_sigmas(e.mean, 1.0, e.std_error));
  const auto dw = p.wiener_increment(3);
  EXPECT_NEAR(dw[0], std::sqrt(p.dt) * p.unit_noise(3)[0], 1e-15);
}

TEST(Simulator, OrnsteinUhlenbeckStationaryVariance) {
  // Independent exact draws of mode k at a long time.
  const Simulator sim(linear_config());
  const auto q = sim.stationary_variances();
  EXPECT_NEAR(q[0], 1.0 / (2.0 * kPi * kPi), 1e-15);
  std::vector<std::vector<double>> sq(3, std::vector<double>(10000));
  for (std::size_t i = 0; i < 10000; ++i) {
    const SpectralField x = sim.final_state(SpectralField(sim.basis()), 1.0, i);
    for (std::size_t k = 0; k < 3; ++k) sq[k][i] = x[k] * x[k];
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const Estimate e = estimate_mean(sq[k]);
    const double target = q[k] * -std::expm1(-2.0 * sim.basis().eigenvalue(k) * 1.0);
    EXPECT_TRUE(within_sigmas(e.mean, target, e.std_error)) << "mode " << k << ": " << e.mean << " vs " << target;
  }
}

TEST(Simulator, ColoredNoiseScalesVariance) {
  SimConfig c = linear_config(4);
  c.gamma = 0.5;
  const Simulator sim(c);
  const auto q = sim.stationary_variances();
  EXPECT_NEAR(q[1], std::pow(4.0 * kPi * kPi, -1.5) / 2.0, 1e-15);
}

TEST(Simulator, StochasticConvolutionVariance) {
  const Simulator sim(linear_config(8));
  const SpectralField zero = sim.sample_stochastic_convolution(0.0, 3);
  EXPECT_EQ(zero.norm(), 0.0);
  const double t = 0.05;
  std::vector<double> sq(10000);
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const SpectralField w = sim.sample_stochastic_convolution(t, i);
    sq[i] = w[2] * w[2];
  }
  const double l = sim.basis().eigenvalue(std::size_t{2});
  const Estimate e = estimate_mean(sq);
  EXPECT_TRUE(within_sigmas(e.mean, -std::expm1(-2.0 * l * t) / (2.0 * l), e.std_error));
}

TEST(Simulator, CovarianceFunction) {
  const Simulator sim(linear_config(8));
  const std::array<double, 3> xi{0.3, 0.5, 0.5};
  EXPECT_EQ(sim.covariance_q(0.0, xi), 0.0);
  const CovarianceBound b = sim.covariance_bound();
  for (double t : {0.01, 0.1, 1.0, 100.0}) EXPECT_LE(sim.covariance_q(t, xi), b.total());
  EXPECT_GT(b.tail, 0.0);
  EXPECT_THROW(sim.covariance_q(1.0, std::array<double, 3>{0.0, 0.5, 0.5}), DomainError);
}

TEST(Simulator, CovarianceTailBoundsDiscardedModes) {
  // The kmax = 8 tail bound must dominate what kmax = 64 adds to the series sup.
  const Simulator coarse(linear_config(8));
  const Simulator fine(linear_config(64));
  EXPECT_GE(coarse.covariance_bound().total(), fine.covariance_bound().truncated);
}

TEST(Simulator, StrongErrorDecreasesUnderRefinement) {
  const double t = 0.5;
  const double h = 0.000625;
  SimConfig c = cubic_config(8);
  std::vector<double> errors;
  std::vector<std::vector<double>> fine_noise(16);
  std::vector<SpectralField> reference;
  {
    c.dt = h;
    const Simulator sim(c);
    const std::size_t n = sim.schedule(t).steps * sim.basis().mode_count();
    for (std::size_t i = 0; i < fine_noise.size(); ++i) {
      RandomStream rng(c.seed, i);
      fine_noise[i].resize(n);
      rng.fill_normal(fine_noise[i]);
      reference.push_back(
          sim.simulate_path_with_noise(test_field(sim.basis(), 3.0), t, fine_noise[i]).final_state());
    }
  }
  std::vector<std::vector<double>> noise = fine_noise;
  double step = h;
  for (int level = 0; level < 4; ++level) {
    c.dt = step * 2.0;
    const Simulator sim(c);
    double err = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
      noise[i] = coarsen_noise(sim.basis(), noise[i], step);
      const SpectralField x = sim.simulate_path_with_noise(test_field(sim.basis(), 3.0), t, noise[i]).final_state();
      err += (x - reference[i]).norm() / static_cast<double>(noise.size());
    }
    errors.push_back(err);
    step *= 2.0;
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_GT(errors[i], errors[i - 1]) << "level " << i;
}

TEST(Variational, LinearCaseIsHeatFlow) {
  const Simulator sim(linear_config());
  const SpectralField h = test_field(sim.basis(), 1.0);
  const PathSample p = sim.simulate_path(SpectralField(sim.basis()), 0.4, 2);
  const VariationalPath v = sim.simulate_variational(p, h);
  for (std::size_t k = 0; k < h.size(); ++k) {
    EXPECT_EQ(v.eta(0)[k], h[k]);
    EXPECT_NEAR(v.eta(v.steps)[k], heat_semigroup(0.4, h)[k], 1e-14);
  }
}

TEST(Variational, MatchesCoupledFiniteDifference) {
  const Simulator sim(cubic_config());
  const SpectralField x = test_field(sim.basis(), 2.0);
  const SpectralField h = test_field(sim.basis(), 1.0);
  const double eps = 1e-5;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const PathSample base = sim.simulate_path(x, 0.5, s);
    const PathSample bumped = sim.simulate_path_with_noise(x + eps * h, 0.5, base.noise);
    const SpectralField fd = (1.0 / eps) * (bumped.final_state() - base.final_state());
    const SpectralField eta = sim.simulate_variational(base, h).eta(base.steps);
    EXPECT_LT((fd - eta).norm(), 1e-3 * eta.norm());
  }
}

TEST(Variational, EnergyNeverIncreases) {
  const Simulator sim(cubic_config(32));
  const SpectralField x = test_field(sim.basis(), 3.0);
  const SpectralField h = test_field(sim.basis(), 1.0);
  const PathSample p = sim.simulate_path(x, 0.5, 9);
  const VariationalPath v = sim.simulate_variational(p, h);
  for (std::size_t m = 0; m < v.steps; ++m) EXPECT_LE(v.eta(m + 1).norm(), v.eta(m).norm() * (1.0 + 1e-8));
}

TEST(Simulator, BlowUpIsReported) {
  SimConfig c = linear_config(4);
  const Simulator sim(c);
  std::vector<double> noise(sim.schedule(0.1).steps * 4, 0.0);
  noise[5] = std::numeric_limits<double>::infinity();
  try {
    sim.simulate_path_with_noise(SpectralField(sim.basis()), 0.1, noise);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_EQ(e.step(), 2u);
  }
}
