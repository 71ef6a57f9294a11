#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace rdspde {

/// Multi-index k = (k_1, ..., k_n) with 1 <= k_i <= kmax. Unused trailing
/// entries (i >= n) are ignored.
using ModeIndex = std::array<int, 3>;

/// Dirichlet sine eigenbasis of the Laplacian on [0,1]^n, truncated to
/// {1..kmax}^n, together with a uniform interior collocation grid of
/// `grid_size` points per axis (xi_j = j / (grid_size + 1), j = 1..grid_size).
///
/// e_k(xi) = 2^{n/2} prod_i sin(k_i pi xi_i) is orthonormal in L^2 and
/// A e_k = -pi^2 |k|^2 e_k. Coefficients are stored row-major over the
/// multi-index (last axis fastest), grid values likewise.
///
/// Cheap to copy: copies share one immutable implementation.
class SpectralBasis {
 public:
  SpectralBasis(int dim, int kmax, int grid_size);

  /// Grid sized so that products of degree `poly_degree` of band-limited
  /// fields project back onto the modes without aliasing:
  /// grid_size = ceil((poly_degree + 1) / 2) * kmax + 1.
  static SpectralBasis dealiased(int dim, int kmax, int poly_degree);

  int dim() const noexcept;
  int kmax() const noexcept;
  int grid_size() const noexcept;
  std::size_t mode_count() const noexcept;
  std::size_t point_count() const noexcept;
  /// Quadrature weight of one grid cell, (grid_size + 1)^{-n}.
  double cell_volume() const noexcept;

  /// pi^2 |k|^2. Throws DomainError when some k_i is outside [1, kmax].
  double eigenvalue(const ModeIndex& k) const;
  /// Eigenvalue of the mode at flat position `mode`.
  double eigenvalue(std::size_t mode) const;
  std::span<const double> eigenvalues() const noexcept;

  ModeIndex mode_index(std::size_t mode) const;
  std::size_t flat_index(const ModeIndex& k) const;

  std::array<double, 3> grid_point(std::size_t point) const;
  double basis_function(std::size_t mode, std::span<const double> xi) const;

  /// Grid values of sum_k coeffs_k e_k. Both spans are sized by this basis.
  void to_grid(std::span<const double> coeffs, std::span<double> values) const;
  /// Quadrature projection of grid values onto the modes; the exact inverse
  /// of to_grid on band-limited fields.
  void from_grid(std::span<const double> values, std::span<double> coeffs) const;

  /// Field values on a uniform interior grid of a different resolution
  /// (grid_size >= kmax).
  std::vector<double> evaluate_on_grid(std::span<const double> coeffs, int grid_size) const;

  /// Same dimension, cutoff and grid.
  bool same_as(const SpectralBasis& other) const noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Real coefficient vector on a SpectralBasis. Represents an element of
/// H = L^2([0,1]^n); the L^2 norm equals the Euclidean norm of the
/// coefficients.
class SpectralField {
 public:
  explicit SpectralField(SpectralBasis basis);
  /// Throws DomainError on size mismatch or non-finite coefficients.
  SpectralField(SpectralBasis basis, std::vector<double> coeffs);

  /// amplitude * e_k.
  static SpectralField unit_mode(const SpectralBasis& basis, const ModeIndex& k, double amplitude = 1.0);

  const SpectralBasis& basis() const noexcept { return basis_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  double norm() const;
  bool all_finite() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

 private:
  SpectralBasis basis_;
  std::vector<double> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField f);

double dot(const SpectralField& a, const SpectralField& b);

/// (-A)^s f: coefficient k scaled by (pi^2 |k|^2)^s.
SpectralField apply_fractional(double s, const SpectralField& f);

/// e^{tA} f. Throws DomainError for t < 0.
SpectralField heat_semigroup(double t, const SpectralField& f);

/// A f = -(-A) f.
SpectralField apply_laplacian(const SpectralField& f);

std::vector<double> to_grid(const SpectralField& f);
SpectralField from_grid(const SpectralBasis& basis, std::span<const double> values);

/// (int |f|^p dxi)^{1/p} for even p >= 2, computed on a grid fine enough
/// that the trapezoidal rule is exact for the trigonometric polynomial f^p.
double lp_norm(const SpectralField& f, int p);

/// |f|_{L^p}^p, same quadrature as lp_norm.
double lp_norm_power(const SpectralField& f, int p);

}  // namespace rdspde
