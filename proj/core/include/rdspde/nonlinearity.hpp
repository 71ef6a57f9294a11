#pragma once

#include <span>
#include <vector>

namespace rdspde {

/// Decreasing polynomial reaction term p(r) = sum_j a_j r^j of odd degree
/// with negative leading coefficient. The all-zero polynomial is admitted
/// as the linear (Gaussian) case. Degree 1 is admitted for test fixtures.
class Polynomial {
 public:
  /// Coefficients a_0..a_N, highest degree last; trailing zeros are dropped.
  /// Throws DomainError for even degree, a_N >= 0, or p' > 0 anywhere on a
  /// dense grid covering every real critical point.
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial zero();
  /// p(r) = -scale * r^3.
  static Polynomial negative_cubic(double scale = 1.0);

  double operator()(double r) const noexcept;
  double derivative(double r) const noexcept;
  /// p(r) and p'(r) in one Horner pass.
  void evaluate(double r, double& value, double& slope) const noexcept;

  /// 0 for the zero polynomial.
  int degree() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  /// c * p for c > 0.
  Polynomial scaled(double c) const;

 private:
  std::vector<double> coeffs_;
};

/// Naive power-sum evaluation; kept for cross-checking Horner.
double eval_p(const Polynomial& poly, double r);

/// Yosida regularization of p: resolvent J = (1 - alpha p)^{-1}, p_alpha =
/// p o J, which is decreasing and Lipschitz with constant <= 1/alpha.
class YosidaApprox {
 public:
  struct Point {
    double resolvent;
    double value;
    double derivative;
  };

  YosidaApprox(Polynomial poly, double alpha, double newton_tol = 1e-12, int newton_max_iter = 100);

  const Polynomial& poly() const noexcept { return poly_; }
  double alpha() const noexcept { return alpha_; }
  double newton_tol() const noexcept { return tol_; }
  double lipschitz_bound() const noexcept { return poly_.is_zero() ? 0.0 : 1.0 / alpha_; }

  /// The unique J with J - alpha p(J) = r. Safeguarded Newton on a bracket;
  /// throws NumericError when the iteration cap is hit.
  double resolvent(double r) const;
  double value(double r) const;
  /// p'(J) / (1 - alpha p'(J)), always in [-1/alpha, 0].
  double derivative(double r) const;
  Point evaluate(double r) const;

 private:
  Polynomial poly_;
  double alpha_;
  double tol_;
  int max_iter_;
};

}  // namespace rdspde
