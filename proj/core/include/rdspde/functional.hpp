#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rdspde/spectral.hpp"

namespace rdspde {

/// phi(x) = f(<x, g_1>, ..., <x, g_m>) with closed-form gradient
/// D phi(x) = sum_i d_i f(...) g_i.
class CylindricalFunctional {
 public:
  enum class Kind { cos, sin, linear, polynomial };

  /// One term coeff * prod_i y_i^{powers[i]} of a polynomial in projections.
  struct Monomial {
    double coeff = 0.0;
    std::vector<int> powers;
  };

  static CylindricalFunctional cosine(SpectralField g);
  static CylindricalFunctional sine(SpectralField g);
  static CylindricalFunctional linear(SpectralField g);
  static CylindricalFunctional polynomial(std::vector<SpectralField> directions, std::vector<Monomial> terms);
  /// phi == c (a polynomial with no directions).
  static CylindricalFunctional constant(double c);

  Kind kind() const noexcept { return kind_; }
  const std::vector<SpectralField>& directions() const noexcept { return directions_; }

  double operator()(std::span<const double> x) const;
  double operator()(const SpectralField& x) const { return (*this)(x.coeffs()); }

  /// <D phi(x), h>.
  double directional_derivative(std::span<const double> x, std::span<const double> h) const;
  SpectralField gradient(const SpectralField& x) const;

  /// sup |phi|; infinity for unbounded kinds.
  double sup_norm() const noexcept;
  bool bounded() const noexcept { return sup_norm() < std::numeric_limits<double>::infinity(); }

  /// Scalar profile f and its derivative for single-direction kinds,
  /// used by one-dimensional quadrature oracles.
  double profile(double y) const;
  std::string describe() const;

 private:
  CylindricalFunctional(Kind kind, std::vector<SpectralField> directions, std::vector<Monomial> terms);
  std::vector<double> projections(std::span<const double> x) const;
  double partial(std::span<const double> y, std::size_t i) const;

  Kind kind_;
  std::vector<SpectralField> directions_;
  std::vector<Monomial> terms_;
};

}  // namespace rdspde
