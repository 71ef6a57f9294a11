#include "rdspde/functional.hpp"

#include <cmath>
#include <sstream>

#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

double dot_span(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CylindricalFunctional::CylindricalFunctional(Kind kind, std::vector<SpectralField> directions,
                                             std::vector<Monomial> terms)
    : kind_(kind), directions_(std::move(directions)), terms_(std::move(terms)) {
  for (std::size_t i = 1; i < directions_.size(); ++i)
    if (!directions_[i].basis().same_as(directions_[0].basis()))
      throw DomainError("functional directions live on different bases");
  for (const Monomial& t : terms_) {
    if (t.powers.size() != directions_.size()) throw DomainError("monomial arity does not match directions");
    for (int p : t.powers)
      if (p < 0) throw DomainError("monomial powers must be nonnegative");
  }
}

CylindricalFunctional CylindricalFunctional::cosine(SpectralField g) {
  return CylindricalFunctional(Kind::cos, {std::move(g)}, {});
}

CylindricalFunctional CylindricalFunctional::sine(SpectralField g) {
  return CylindricalFunctional(Kind::sin, {std::move(g)}, {});
}

CylindricalFunctional CylindricalFunctional::linear(SpectralField g) {
  return CylindricalFunctional(Kind::linear, {std::move(g)}, {});
}

CylindricalFunctional CylindricalFunctional::polynomial(std::vector<SpectralField> directions,
                                                        std::vector<Monomial> terms) {
  return CylindricalFunctional(Kind::polynomial, std::move(directions), std::move(terms));
}

CylindricalFunctional CylindricalFunctional::constant(double c) {
  return CylindricalFunctional(Kind::polynomial, {}, {Monomial{c, {}}});
}

std::vector<double> CylindricalFunctional::projections(std::span<const double> x) const {
  std::vector<double> y(directions_.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (directions_[i].size() != x.size()) throw DomainError("functional evaluated on a field of the wrong size");
    y[i] = dot_span(directions_[i].coeffs(), x);
  }
  return y;
}

double CylindricalFunctional::profile(double y) const {
  switch (kind_) {
    case Kind::cos:
      return std::cos(y);
    case Kind::sin:
      return std::sin(y);
    case Kind::linear:
      return y;
    case Kind::polynomial:
      break;
  }
  if (directions_.size() > 1) throw DomainError("profile needs at most one direction");
  double v = 0.0;
  for (const Monomial& t : terms_) v += t.coeff * (t.powers.empty() ? 1.0 : std::pow(y, t.powers[0]));
  return v;
}

double CylindricalFunctional::operator()(std::span<const double> x) const {
  const auto y = projections(x);
  if (kind_ != Kind::polynomial) return profile(y[0]);
  double v = 0.0;
  for (const Monomial& t : terms_) {
    double term = t.coeff;
    for (std::size_t i = 0; i < y.size(); ++i) term *= std::pow(y[i], t.powers[i]);
    v += term;
  }
  return v;
}

double CylindricalFunctional::partial(std::span<const double> y, std::size_t i) const {
  switch (kind_) {
    case Kind::cos:
      return -std::sin(y[0]);
    case Kind::sin:
      return std::cos(y[0]);
    case Kind::linear:
      return 1.0;
    case Kind::polynomial:
      break;
  }
  double v = 0.0;
  for (const Monomial& t : terms_) {
    if (t.powers[i] == 0) continue;
    double term = t.coeff * t.powers[i];
    for (std::size_t j = 0; j < y.size(); ++j) term *= std::pow(y[j], j == i ? t.powers[j] - 1 : t.powers[j]);
    v += term;
  }
  return v;
}

double CylindricalFunctional::directional_derivative(std::span<const double> x, std::span<const double> h) const {
  const auto y = projections(x);
  double v = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) v += partial(y, i) * dot_span(directions_[i].coeffs(), h);
  return v;
}

SpectralField CylindricalFunctional::gradient(const SpectralField& x) const {
  SpectralField out(x.basis());
  const auto y = projections(x.coeffs());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = partial(y, i);
    const auto g = directions_[i].coeffs();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d * g[k];
  }
  return out;
}

double CylindricalFunctional::sup_norm() const noexcept {
  switch (kind_) {
    case Kind::cos:
    case Kind::sin:
      return 1.0;
    case Kind::linear:
      return std::numeric_limits<double>::infinity();
    case Kind::polynomial:
      break;
  }
  double s = 0.0;
  for (const Monomial& t : terms_) {
    for (int p : t.powers)
      if (p > 0 && t.coeff != 0.0) return std::numeric_limits<double>::infinity();
    s += std::abs(t.coeff);
  }
  return s;
}

std::string CylindricalFunctional::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::cos:
      os << "cos<x,g>";
      break;
    case Kind::sin:
      os << "sin<x,g>";
      break;
    case Kind::linear:
      os << "<x,g>";
      break;
    case Kind::polynomial:
      os << "poly(" << directions_.size() << " projections, " << terms_.size() << " terms)";
      break;
  }
  if (!directions_.empty()) os << " |g|=" << directions_[0].norm();
  return os.str();
}

}  // namespace rdspde
