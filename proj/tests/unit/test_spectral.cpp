#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rdspde/errors.hpp"
#include "rdspde/spectral.hpp"

using namespace rdspde;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_coeffs(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<double> c(n);
  for (double& v : c) v = nd(gen);
  return c;
}

// Direct summation of sum_k c_k 2^{n/2} prod sin(k_i pi xi_i).
double direct_value(const SpectralBasis& b, std::span<const double> c, const std::array<double, 3>& xi) {
  double v = 0.0;
  for (std::size_t m = 0; m < b.mode_count(); ++m) {
    const ModeIndex k = b.mode_index(m);
    double e = std::pow(2.0, 0.5 * b.dim());
    for (int i = 0; i < b.dim(); ++i) e *= std::sin(k[static_cast<std::size_t>(i)] * kPi * xi[static_cast<std::size_t>(i)]);
    v += c[m] * e;
  }
  return v;
}

// Trapezoid on a very fine grid, independent of the transform.
double fine_lp_power(const SpectralBasis& b, std::span<const double> c, int p, int points) {
  double sum = 0.0;
  for (int j = 1; j < points; ++j) {
    const double v = direct_value(b, c, {static_cast<double>(j) / points, 0.5, 0.5});
    sum += std::pow(v, p);
  }
  return sum / points;
}

}  // namespace

class TransformTest : public ::testing::TestWithParam<std::array<int, 3>> {};

TEST_P(TransformTest, ToGridMatchesDirectSummation) {
  const auto [dim, kmax, grid] = GetParam();
  const SpectralBasis b(dim, kmax, grid);
  const auto c = random_coeffs(b.mode_count(), 11);
  std::vector<double> g(b.point_count());
  b.to_grid(c, g);
  for (std::size_t p = 0; p < b.point_count(); p += 7) EXPECT_NEAR(g[p], direct_value(b, c, b.grid_point(p)), 1e-11);
}

TEST_P(TransformTest, FromGridInvertsToGrid) {
  const auto [dim, kmax, grid] = GetParam();
  const SpectralBasis b(dim, kmax, grid);
  const auto c = random_coeffs(b.mode_count(), 12);
  std::vector<double> g(b.point_count()), back(b.mode_count());
  b.to_grid(c, g);
  b.from_grid(g, back);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(back[k], c[k], 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Shapes, TransformTest,
                         ::testing::Values(std::array<int, 3>{1, 8, 8}, std::array<int, 3>{1, 16, 33},
                                           std::array<int, 3>{1, 32, 65}, std::array<int, 3>{2, 6, 13},
                                           std::array<int, 3>{3, 4, 9}));

TEST(SpectralBasis, EigenvaluesAreLaplacianSpectrum) {
  const SpectralBasis b(2, 4, 9);
  EXPECT_DOUBLE_EQ(b.eigenvalue(ModeIndex{1, 1, 0}), 2.0 * kPi * kPi);
  EXPECT_DOUBLE_EQ(b.eigenvalue(ModeIndex{3, 2, 0}), 13.0 * kPi * kPi);
  EXPECT_EQ(b.mode_count(), 16u);
  EXPECT_EQ(b.flat_index(b.mode_index(11)), 11u);
}

TEST(SpectralBasis, RejectsOutOfRangeModes) {
  const SpectralBasis b(1, 4, 5);
  EXPECT_THROW(b.eigenvalue(ModeIndex{0, 0, 0}), DomainError);
  EXPECT_THROW(b.eigenvalue(ModeIndex{5, 0, 0}), DomainError);
}

TEST(SpectralBasis, DealiasedGridSize) {
  EXPECT_EQ(SpectralBasis::dealiased(1, 32, 3).grid_size(), 65);
  EXPECT_EQ(SpectralBasis::dealiased(1, 16, 5).grid_size(), 49);
  EXPECT_EQ(SpectralBasis::dealiased(1, 8, 0).grid_size(), 9);
}

TEST(SpectralBasis, BasisFunctionsOrthonormalOnGrid) {
  const SpectralBasis b(1, 6, 6);
  for (std::size_t i = 0; i < b.mode_count(); ++i)
    for (std::size_t j = 0; j < b.mode_count(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < b.point_count(); ++p) {
        const auto xi = b.grid_point(p);
        s += b.basis_function(i, xi) * b.basis_function(j, xi);
      }
      EXPECT_NEAR(s * b.cell_volume(), i == j ? 1.0 : 0.0, 1e-12);
    }
}

TEST(SpectralField, HeatSemigroup) {
  const SpectralBasis b(1, 8, 8);
  SpectralField f(b, random_coeffs(8, 3));
  const SpectralField same = heat_semigroup(0.0, f);
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_EQ(same[k], f[k]);
  const SpectralField g = heat_semigroup(0.1, f);
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(g[k], std::exp(-0.1 * b.eigenvalue(k)) * f[k], 1e-15);
  // Semigroup property.
  const SpectralField two = heat_semigroup(0.05, heat_semigroup(0.05, f));
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(two[k], g[k], 1e-14);
  EXPECT_THROW(heat_semigroup(-1.0, f), DomainError);
}

TEST(SpectralField, FractionalPowers) {
  const SpectralBasis b(1, 5, 5);
  const SpectralField f(b, random_coeffs(5, 4));
  const SpectralField a = apply_fractional(0.5, apply_fractional(0.5, f));
  const SpectralField l = apply_laplacian(f);
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(a[k], -l[k], 1e-10 * std::abs(l[k]) + 1e-14);
  const SpectralField id = apply_fractional(0.0, f);
  for (std::size_t k = 0; k < f.size(); ++k) EXPECT_EQ(id[k], f[k]);
}

TEST(SpectralField, RejectsNonFiniteAndWrongSize) {
  const SpectralBasis b(1, 3, 3);
  EXPECT_THROW(SpectralField(b, {1.0, 2.0}), DomainError);
  EXPECT_THROW(SpectralField(b, {1.0, NAN, 0.0}), DomainError);
}

TEST(LpNorm, SingleModeClosedForms) {
  const SpectralBasis b(1, 4, 5);
  const SpectralField e3 = SpectralField::unit_mode(b, {3, 0, 0});
  EXPECT_NEAR(lp_norm(e3, 2), 1.0, 1e-14);
  // int (sqrt2 sin)^4 = 4 * 3/8, int (sqrt2 sin)^6 = 8 * 5/16.
  EXPECT_NEAR(lp_norm_power(e3, 4), 1.5, 1e-13);
  EXPECT_NEAR(lp_norm_power(e3, 6), 2.5, 1e-13);
}

TEST(LpNorm, MatchesFineGridOracle) {
  const SpectralBasis b(1, 12, 12);
  const SpectralField f(b, random_coeffs(12, 5));
  for (int p : {2, 4, 6, 8}) {
    const double oracle = fine_lp_power(b, f.coeffs(), p, 4001);
    EXPECT_NEAR(lp_norm_power(f, p), oracle, 1e-10 * oracle) << "p = " << p;
  }
}

TEST(LpNorm, ParsevalInHigherDimensions) {
  const SpectralBasis b(3, 3, 3);
  const SpectralField f(b, random_coeffs(b.mode_count(), 6));
  EXPECT_NEAR(lp_norm(f, 2), f.norm(), 1e-12);
}

TEST(LpNorm, RejectsOddOrSmallExponents) {
  const SpectralBasis b(1, 3, 3);
  const SpectralField f(b);
  EXPECT_THROW(lp_norm(f, 3), DomainError);
  EXPECT_THROW(lp_norm(f, 0), DomainError);
}
