#include "rdspde/nonlinearity.hpp"

#include <algorithm>
#include <cmath>

#include "rdspde/errors.hpp"

namespace rdspde {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw DomainError("polynomial coefficients must be finite");
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) return;

  const int n = degree();
  if (n % 2 == 0) throw DomainError("polynomial degree must be odd (got " + std::to_string(n) + ")");
  if (coeffs_.back() >= 0.0) throw DomainError("leading coefficient must be negative");
  if (n == 1) return;

  // Real roots of p' lie within the Cauchy bound; outside it p' < 0.
  const double lead = n * coeffs_.back();
  double bound = 0.0;
  for (int j = 1; j < n; ++j) bound = std::max(bound, std::abs(j * coeffs_[static_cast<std::size_t>(j)] / lead));
  const double radius = 1.0 + bound;
  double scale = 0.0;
  for (int j = 1; j <= n; ++j) scale += j * std::abs(coeffs_[static_cast<std::size_t>(j)]) * std::pow(radius, j - 1);
  constexpr int kSamples = 8192;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = -radius + 2.0 * radius * i / kSamples;
    if (derivative(r) > 1e-12 * scale)
      throw DomainError("polynomial is not decreasing (p'(" + std::to_string(r) + ") > 0)");
  }
}

Polynomial Polynomial::zero() { return Polynomial({}); }

Polynomial Polynomial::negative_cubic(double scale) { return Polynomial({0.0, 0.0, 0.0, -scale}); }

double Polynomial::operator()(double r) const noexcept {
  double v = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * r + *it;
  return v;
}

double Polynomial::derivative(double r) const noexcept {
  double v = 0.0, d = 0.0;
  evaluate(r, v, d);
  return d;
}

void Polynomial::evaluate(double r, double& value, double& slope) const noexcept {
  double v = 0.0, d = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    d = d * r + v;
    v = v * r + *it;
  }
  value = v;
  slope = d;
}

Polynomial Polynomial::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("polynomial scale must be positive");
  std::vector<double> out = coeffs_;
  for (double& a : out) a *= c;
  return Polynomial(std::move(out));
}

double eval_p(const Polynomial& poly, double r) {
  double sum = 0.0;
  const auto a = poly.coefficients();
  for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * std::pow(r, static_cast<double>(j));
  return sum;
}

// ---------------------------------------------------------------------------

YosidaApprox::YosidaApprox(Polynomial poly, double alpha, double newton_tol, int newton_max_iter)
    : poly_(std::move(poly)), alpha_(alpha), tol_(newton_tol), max_iter_(newton_max_iter) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("Yosida parameter alpha must be positive");
  if (!(newton_tol > 0.0)) throw DomainError("newton_tol must be positive");
  if (newton_max_iter < 1) throw DomainError("newton_max_iter must be positive");
}

double YosidaApprox::resolvent(double r) const {
  if (poly_.is_zero()) return r;
  if (!std::isfinite(r)) throw NumericError("resolvent of a non-finite value");

  // g(s) = s - alpha p(s) - r is strictly increasing with g' >= 1.
  auto g = [&](double s, double& slope) {
    double v = 0.0, d = 0.0;
    poly_.evaluate(s, v, d);
    slope = 1.0 - alpha_ * d;
    return s - alpha_ * v - r;
  };
  const double target = tol_ * (1.0 + std::abs(r));

  double slope = 1.0;
  double s = r;
  double gs = g(s, slope);
  if (std::abs(gs) <= target) return s;

  double lo = s, hi = s;
  double step = std::max(1.0, std::abs(s));
  for (int i = 0;; ++i) {
    if (i > 200) throw NumericError("resolvent bracket search failed");
    double unused = 0.0;
    if (gs > 0.0) {
      lo = s - step;
      if (g(lo, unused) <= 0.0) break;
      hi = lo;
    } else {
      hi = s + step;
      if (g(hi, unused) >= 0.0) break;
      lo = hi;
    }
    step *= 2.0;
  }

  for (int it = 0; it < max_iter_; ++it) {
    double next = s - gs / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
    gs = g(s, slope);
    if (std::abs(gs) <= target) {
      // One more Newton step costs little and brings J to full precision.
      const double polished = s - gs / slope;
      return (polished >= lo && polished <= hi) ? polished : s;
    }
    if (gs > 0.0)
      hi = s;
    else
      lo = s;
  }
  throw NumericError("resolvent Newton iteration did not converge");
}

double YosidaApprox::value(double r) const { return evaluate(r).value; }

double YosidaApprox::derivative(double r) const { return evaluate(r).derivative; }

YosidaApprox::Point YosidaApprox::evaluate(double r) const {
  if (poly_.is_zero()) return {r, 0.0, 0.0};
  const double j = resolvent(r);
  double v = 0.0, d = 0.0;
  poly_.evaluate(j, v, d);
  return {j, v, d / (1.0 - alpha_ * d)};
}

}  // namespace rdspde
