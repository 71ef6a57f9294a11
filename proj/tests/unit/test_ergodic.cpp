#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "rdspde/ensemble_io.hpp"
#include "rdspde/ergodic.hpp"
#include "rdspde/errors.hpp"

using namespace rdspde;

namespace {

using CF = CylindricalFunctional;

Simulator make_sim(bool cubic, double alpha = 0.1, int kmax = 8) {
  SimConfig c;
  c.kmax = kmax;
  c.alpha = alpha;
  if (!cubic) c.poly = Polynomial::zero();
  return Simulator(c);
}

InvariantEnsemble ensemble(const Simulator& sim, std::size_t n = 4000, std::uint64_t stream = 0) {
  return sample_invariant(sim, default_burn_in(sim.basis()), n, default_thinning(sim), stream);
}

SpectralField mode(const SpectralBasis& b, int k, double a = 1.0) { return SpectralField::unit_mode(b, {k, 1, 1}, a); }

}  // namespace

TEST(Invariant, GaussianModeVariances) {
  const Simulator sim = make_sim(false);
  const InvariantEnsemble ens = ensemble(sim);
  EXPECT_TRUE(ens.stationary);
  const auto m = mode_second_moments(ens);
  const auto q = sim.stationary_variances();
  for (std::size_t k = 0; k < m.size(); ++k)
    EXPECT_TRUE(within_sigmas(m[k].mean, q[k], m[k].std_error)) << "mode " << k;
}

TEST(Invariant, GaussianSecondMomentOfNorm) {
  const Simulator sim = make_sim(false);
  const InvariantEnsemble ens = ensemble(sim);
  double total = 0.0;
  for (double q : sim.stationary_variances()) total += q;
  const Estimate e = moment_l2N(ens, 1);
  EXPECT_TRUE(within_sigmas(e.mean, total, e.std_error));
}

TEST(Invariant, CubicDissipationLowersVariance) {
  // Paired chains: identical noise, so the comparison is sharp.
  const Simulator lin = make_sim(false, 0.1, 4);
  const Simulator cub = make_sim(true, 0.1, 4);
  const auto a = mode_second_moments(ensemble(lin));
  const auto b = mode_second_moments(ensemble(cub));
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LT(b[k].mean, a[k].mean) << "mode " << k;
}

TEST(Invariant, DisjointSeedsAgree) {
  const Simulator sim = make_sim(true);
  const auto fn = [](std::span<const double> c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    return s;
  };
  const Estimate a = ensemble_average(ensemble(sim, 4000, 1), fn);
  const Estimate b = ensemble_average(ensemble(sim, 4000, 2), fn);
  EXPECT_TRUE(within_sigmas(a.mean - b.mean, 0.0, combined_std_error(a.std_error, b.std_error)));
}

TEST(Invariant, ScalingNonlinearityReducesMoments) {
  SimConfig c;
  c.kmax = 4;
  c.alpha = 0.1;
  const Simulator one(c);
  c.poly = c.poly.scaled(2.0);
  const Simulator two(c);
  for (int n : {1, 2}) EXPECT_LT(moment_l2N(ensemble(two), n).mean, moment_l2N(ensemble(one), n).mean);
}

TEST(Invariant, PreconditionsEnforced) {
  const Simulator sim = make_sim(true);
  const double l1 = sim.basis().eigenvalue(std::size_t{0});
  EXPECT_THROW(sample_invariant(sim, 5.0 / l1, 200, default_thinning(sim)), DomainError);
  EXPECT_THROW(sample_invariant(sim, 20.0 / l1, 200, 1), DomainError);
  EXPECT_THROW(sample_invariant(sim, 20.0 / l1, 50, default_thinning(sim)), DomainError);
}

TEST(CompareMeasures, IdenticalEnsemblesHaveZeroDistance) {
  const Simulator sim = make_sim(true);
  const InvariantEnsemble ens = ensemble(sim, 500);
  for (const auto& d : compare_measures(ens, ens)) {
    EXPECT_TRUE(d.paired);
    EXPECT_EQ(d.distance, 0.0) << d.functional;
  }
  EXPECT_EQ(measure_battery_names().size(), compare_measures(ens, ens).size());
}

TEST(CompareMeasures, AlphaIrrelevantWithoutNonlinearity) {
  const auto a = ensemble(make_sim(false, 0.5), 500);
  const auto b = ensemble(make_sim(false, 0.02), 500);
  for (const auto& d : compare_measures(a, b)) EXPECT_EQ(d.distance, 0.0) << d.functional;
}

TEST(CompareMeasures, DistancesShrinkAsAlphaDecreases) {
  const auto a = ensemble(make_sim(true, 0.5), 2000);
  const auto b = ensemble(make_sim(true, 0.2), 2000);
  const auto c = ensemble(make_sim(true, 0.05), 2000);
  const auto far = compare_measures(a, b);
  const auto near = compare_measures(b, c);
  for (std::size_t i = 0; i < far.size(); ++i)
    EXPECT_LE(near[i].distance, far[i].distance + 3.0 * combined_std_error(far[i].std_error, near[i].std_error))
        << far[i].functional;
}

TEST(Invariance, ReEvolutionPreservesAverages) {
  const Simulator sim = make_sim(true);
  const InvariantEnsemble ens = ensemble(sim, 2000);
  for (const auto& r : invariance_check(sim, ens, 0.5, {StreamRange{}.split(5, 8), 1}))
    EXPECT_LE(r.z, 3.0) << r.functional;
}

TEST(Ibp, ConstantFunctionalHasZeroLhs) {
  const Simulator sim = make_sim(true);
  const InvariantEnsemble ens = ensemble(sim, 500);
  const IbpReport r = ibp_check(sim, ens, CF::constant(1.0), mode(sim.basis(), 2));
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_FALSE(r.gaussian.has_value());
}

TEST(Ibp, LinearInDirection) {
  const Simulator sim = make_sim(true);
  const InvariantEnsemble ens = ensemble(sim, 500);
  const auto phi = CF::sine(mode(sim.basis(), 1) + mode(sim.basis(), 2));
  const SpectralField h1 = mode(sim.basis(), 1), h2 = mode(sim.basis(), 2, 0.3);
  const double a = ibp_check(sim, ens, phi, h1).lhs;
  const double b = ibp_check(sim, ens, phi, h2).lhs;
  EXPECT_NEAR(ibp_check(sim, ens, phi, h1 + h2).lhs, a + b, 1e-12);
}

TEST(Ibp, GaussianQuadratureClosedForm) {
  // E[sin(Y) Y] = s^2 exp(-s^2 / 2) for Y ~ N(0, s^2).
  const Simulator sim = make_sim(false);
  const SpectralBasis& b = sim.basis();
  const SpectralField g = mode(b, 2, 1.5);
  const SpectralField h = mode(b, 2) + mode(b, 3);
  const double l = b.eigenvalue(std::size_t{1});
  const double s2 = 2.25 * sim.stationary_variances()[1];
  const double cov = 1.5 / l;
  const double expected = cov / s2 * s2 * std::exp(-0.5 * s2);
  EXPECT_NEAR(gaussian_ibp_quadrature(sim, CF::sine(g), h), expected, 1e-10);
}

TEST(Ibp, GaussianIdentityHolds) {
  const Simulator sim = make_sim(false);
  const InvariantEnsemble ens = ensemble(sim, 4000);
  const IbpReport r = ibp_check(sim, ens, CF::sine(mode(sim.basis(), 1)), mode(sim.basis(), 1));
  ASSERT_TRUE(r.gaussian.has_value());
  const GaussianIbp& g = *r.gaussian;
  EXPECT_TRUE(g.has_quadrature);
  EXPECT_TRUE(within_sigmas(g.lhs, g.rhs_quadrature, g.lhs_std_error));
  EXPECT_TRUE(within_sigmas(g.rhs_monte_carlo, g.rhs_quadrature, g.rhs_mc_std_error));
}

TEST(EnsembleIo, RoundTripIsExact) {
  const Simulator sim = make_sim(true);
  const InvariantEnsemble ens = ensemble(sim, 150);
  std::stringstream buf;
  write_ensemble(ens, buf);
  const InvariantEnsemble back = read_ensemble(buf);
  EXPECT_EQ(back.data, ens.data);
  EXPECT_EQ(back.count, ens.count);
  EXPECT_EQ(back.config_hash, ens.config_hash);
  EXPECT_EQ(back.thinning, ens.thinning);
  EXPECT_EQ(back.alpha, ens.alpha);
  EXPECT_TRUE(back.basis.same_as(ens.basis));
}

TEST(EnsembleIo, RejectsMalformedFiles) {
  std::stringstream bad("# format=something-else\n");
  EXPECT_THROW(read_ensemble(bad), ConfigError);
  const Simulator sim = make_sim(true);
  std::stringstream buf;
  write_ensemble(ensemble(sim, 150), buf);
  std::string text = buf.str();
  text.resize(text.size() / 2);
  std::stringstream truncated(text);
  EXPECT_THROW(read_ensemble(truncated), ConfigError);
}

TEST(EnsembleIo, FingerprintTracksConfiguration) {
  SimConfig a;
  SimConfig b = a;
  b.alpha = 0.05;
  EXPECT_NE(ensemble_fingerprint(a, 1.0, 100, 10, 0), ensemble_fingerprint(b, 1.0, 100, 10, 0));
  EXPECT_EQ(ensemble_fingerprint(a, 1.0, 100, 10, 0), ensemble_fingerprint(a, 1.0, 100, 10, 0));
}
