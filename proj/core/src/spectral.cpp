#include "rdspde/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "rdspde/errors.hpp"

namespace rdspde {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan on
// fresh arrays is. Plans live for the whole process.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan dst_plan(int dim, int grid) {
  static std::map<std::pair<int, int>, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_pair(dim, grid);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(grid);
  std::vector<double> in(total), out(total);
  std::array<int, 3> n{grid, grid, grid};
  std::array<fftw_r2r_kind, 3> kinds{FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00};
  fftw_plan plan = fftw_plan_r2r(dim, n.data(), in.data(), out.data(), kinds.data(),
                                 FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
  if (plan == nullptr) throw NumericError("FFTW could not plan a DST-I transform");
  plans.emplace(key, plan);
  return plan;
}

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

struct Scratch {
  std::vector<double> in;
  std::vector<double> out;
};

Scratch& scratch(std::size_t total) {
  thread_local Scratch s;
  if (s.in.size() < total) {
    s.in.resize(total);
    s.out.resize(total);
  }
  return s;
}

// Scatter coefficients (kmax^n, row-major) into a zero-padded grid^n array.
void pad_modes(std::span<const double> coeffs, int dim, int kmax, int grid, double* dst) {
  const std::size_t total = ipow(static_cast<std::size_t>(grid), dim);
  std::fill(dst, dst + total, 0.0);
  const auto K = static_cast<std::size_t>(kmax);
  const auto G = static_cast<std::size_t>(grid);
  switch (dim) {
    case 1:
      std::copy(coeffs.begin(), coeffs.end(), dst);
      break;
    case 2:
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b) dst[a * G + b] = coeffs[a * K + b];
      break;
    default:
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b)
          for (std::size_t c = 0; c < K; ++c) dst[(a * G + b) * G + c] = coeffs[(a * K + b) * K + c];
  }
}

void gather_modes(const double* src, int dim, int kmax, int grid, double scale, std::span<double> coeffs) {
  const auto K = static_cast<std::size_t>(kmax);
  const auto G = static_cast<std::size_t>(grid);
  switch (dim) {
    case 1:
      for (std::size_t a = 0; a < K; ++a) coeffs[a] = scale * src[a];
      break;
    case 2:
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b) coeffs[a * K + b] = scale * src[a * G + b];
      break;
    default:
      for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = 0; b < K; ++b)
          for (std::size_t c = 0; c < K; ++c) coeffs[(a * K + b) * K + c] = scale * src[(a * G + b) * G + c];
  }
}

}  // namespace

struct SpectralBasis::Impl {
  int dim;
  int kmax;
  int grid;
  std::size_t modes;
  std::size_t points;
  std::vector<double> eigen;
  fftw_plan plan;
};

SpectralBasis::SpectralBasis(int dim, int kmax, int grid_size) {
  if (dim < 1 || dim > 3) throw DomainError("spatial dimension must be 1, 2 or 3");
  if (kmax < 1) throw DomainError("kmax must be positive");
  if (grid_size < kmax) throw DomainError("grid_size must be at least kmax");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->kmax = kmax;
  impl->grid = grid_size;
  impl->modes = ipow(static_cast<std::size_t>(kmax), dim);
  impl->points = ipow(static_cast<std::size_t>(grid_size), dim);
  impl->eigen.resize(impl->modes);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t m = 0; m < impl->modes; ++m) {
    std::size_t rest = m;
    double k2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double k = static_cast<double>(rest % static_cast<std::size_t>(kmax) + 1);
      rest /= static_cast<std::size_t>(kmax);
      k2 += k * k;
    }
    impl->eigen[m] = pi2 * k2;
  }
  impl->plan = dst_plan(dim, grid_size);
  impl_ = std::move(impl);
}

SpectralBasis SpectralBasis::dealiased(int dim, int kmax, int poly_degree) {
  const int degree = std::max(1, poly_degree);
  const int factor = (degree + 2) / 2;  // ceil((degree + 1) / 2)
  return SpectralBasis(dim, kmax, factor * kmax + 1);
}

int SpectralBasis::dim() const noexcept { return impl_->dim; }
int SpectralBasis::kmax() const noexcept { return impl_->kmax; }
int SpectralBasis::grid_size() const noexcept { return impl_->grid; }
std::size_t SpectralBasis::mode_count() const noexcept { return impl_->modes; }
std::size_t SpectralBasis::point_count() const noexcept { return impl_->points; }

double SpectralBasis::cell_volume() const noexcept {
  return std::pow(1.0 / (impl_->grid + 1), impl_->dim);
}

double SpectralBasis::eigenvalue(const ModeIndex& k) const { return impl_->eigen[flat_index(k)]; }

double SpectralBasis::eigenvalue(std::size_t mode) const {
  if (mode >= impl_->modes) throw DomainError("mode index out of range");
  return impl_->eigen[mode];
}

std::span<const double> SpectralBasis::eigenvalues() const noexcept { return impl_->eigen; }

ModeIndex SpectralBasis::mode_index(std::size_t mode) const {
  if (mode >= impl_->modes) throw DomainError("mode index out of range");
  ModeIndex k{0, 0, 0};
  for (int i = impl_->dim - 1; i >= 0; --i) {
    k[static_cast<std::size_t>(i)] = static_cast<int>(mode % static_cast<std::size_t>(impl_->kmax)) + 1;
    mode /= static_cast<std::size_t>(impl_->kmax);
  }
  return k;
}

std::size_t SpectralBasis::flat_index(const ModeIndex& k) const {
  std::size_t flat = 0;
  for (int i = 0; i < impl_->dim; ++i) {
    const int ki = k[static_cast<std::size_t>(i)];
    if (ki < 1 || ki > impl_->kmax) throw DomainError("multi-index component outside [1, kmax]");
    flat = flat * static_cast<std::size_t>(impl_->kmax) + static_cast<std::size_t>(ki - 1);
  }
  return flat;
}

std::array<double, 3> SpectralBasis::grid_point(std::size_t point) const {
  if (point >= impl_->points) throw DomainError("grid point index out of range");
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  const double h = 1.0 / (impl_->grid + 1);
  for (int i = impl_->dim - 1; i >= 0; --i) {
    xi[static_cast<std::size_t>(i)] = h * static_cast<double>(point % static_cast<std::size_t>(impl_->grid) + 1);
    point /= static_cast<std::size_t>(impl_->grid);
  }
  return xi;
}

double SpectralBasis::basis_function(std::size_t mode, std::span<const double> xi) const {
  const ModeIndex k = mode_index(mode);
  double v = std::pow(2.0, 0.5 * impl_->dim);
  for (int i = 0; i < impl_->dim; ++i)
    v *= std::sin(k[static_cast<std::size_t>(i)] * std::numbers::pi * xi[static_cast<std::size_t>(i)]);
  return v;
}

void SpectralBasis::to_grid(std::span<const double> coeffs, std::span<double> values) const {
  if (coeffs.size() != impl_->modes || values.size() != impl_->points)
    throw DomainError("to_grid: shape mismatch");
  Scratch& s = scratch(impl_->points);
  pad_modes(coeffs, impl_->dim, impl_->kmax, impl_->grid, s.in.data());
  fftw_execute_r2r(impl_->plan, s.in.data(), values.data());
  const double scale = std::pow(2.0, -0.5 * impl_->dim);
  for (double& v : values) v *= scale;
}

void SpectralBasis::from_grid(std::span<const double> values, std::span<double> coeffs) const {
  if (coeffs.size() != impl_->modes || values.size() != impl_->points)
    throw DomainError("from_grid: shape mismatch");
  Scratch& s = scratch(impl_->points);
  std::copy(values.begin(), values.end(), s.in.begin());
  fftw_execute_r2r(impl_->plan, s.in.data(), s.out.data());
  const double scale = std::pow(2.0, -0.5 * impl_->dim) * cell_volume();
  gather_modes(s.out.data(), impl_->dim, impl_->kmax, impl_->grid, scale, coeffs);
}

std::vector<double> SpectralBasis::evaluate_on_grid(std::span<const double> coeffs, int grid_size) const {
  if (coeffs.size() != impl_->modes) throw DomainError("evaluate_on_grid: shape mismatch");
  if (grid_size < impl_->kmax) throw DomainError("evaluation grid coarser than kmax");
  const std::size_t total = ipow(static_cast<std::size_t>(grid_size), impl_->dim);
  std::vector<double> in(total), out(total);
  pad_modes(coeffs, impl_->dim, impl_->kmax, grid_size, in.data());
  fftw_execute_r2r(dst_plan(impl_->dim, grid_size), in.data(), out.data());
  const double scale = std::pow(2.0, -0.5 * impl_->dim);
  for (double& v : out) v *= scale;
  return out;
}

bool SpectralBasis::same_as(const SpectralBasis& other) const noexcept {
  return impl_ == other.impl_ ||
         (impl_->dim == other.impl_->dim && impl_->kmax == other.impl_->kmax && impl_->grid == other.impl_->grid);
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(SpectralBasis basis)
    : basis_(std::move(basis)), coeffs_(basis_.mode_count(), 0.0) {}

SpectralField::SpectralField(SpectralBasis basis, std::vector<double> coeffs)
    : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_.mode_count()) throw DomainError("coefficient count does not match basis");
  if (!all_finite()) throw DomainError("non-finite coefficient");
}

SpectralField SpectralField::unit_mode(const SpectralBasis& basis, const ModeIndex& k, double amplitude) {
  SpectralField f(basis);
  f.coeffs_[basis.flat_index(k)] = amplitude;
  return f;
}

double SpectralField::norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

bool SpectralField::all_finite() const {
  for (double c : coeffs_)
    if (!std::isfinite(c)) return false;
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (!basis_.same_as(other.basis_)) throw DomainError("fields live on different bases");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (!basis_.same_as(other.basis_)) throw DomainError("fields live on different bases");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (double& c : coeffs_) c *= scale;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField f) { return f *= s; }

double dot(const SpectralField& a, const SpectralField& b) {
  if (!a.basis().same_as(b.basis())) throw DomainError("fields live on different bases");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

SpectralField apply_fractional(double s, const SpectralField& f) {
  if (!std::isfinite(s)) throw DomainError("non-finite exponent");
  if (!f.all_finite()) throw DomainError("non-finite field");
  SpectralField out = f;
  const auto lambda = f.basis().eigenvalues();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(lambda[i], s);
  return out;
}

SpectralField heat_semigroup(double t, const SpectralField& f) {
  if (!(t >= 0.0)) throw DomainError("heat semigroup needs t >= 0");
  SpectralField out = f;
  const auto lambda = f.basis().eigenvalues();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(-lambda[i] * t);
  return out;
}

SpectralField apply_laplacian(const SpectralField& f) {
  SpectralField out = f;
  const auto lambda = f.basis().eigenvalues();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -lambda[i];
  return out;
}

std::vector<double> to_grid(const SpectralField& f) {
  std::vector<double> values(f.basis().point_count());
  f.basis().to_grid(f.coeffs(), values);
  return values;
}

SpectralField from_grid(const SpectralBasis& basis, std::span<const double> values) {
  SpectralField f(basis);
  basis.from_grid(values, f.coeffs());
  return f;
}

double lp_norm_power(const SpectralField& f, int p) {
  if (p < 2 || p % 2 != 0) throw DomainError("lp_norm supports even p >= 2 only");
  const SpectralBasis& basis = f.basis();
  // f^p has frequencies up to p * kmax; the trapezoidal rule with M
  // intervals per axis is exact for them once 2M > p * kmax.
  const int intervals = (p / 2) * basis.kmax() + 1;
  const std::vector<double> values = basis.evaluate_on_grid(f.coeffs(), intervals - 1);
  double sum = 0.0;
  for (double v : values) {
    const double v2 = v * v;
    double term = 1.0;
    for (int i = 0; i < p / 2; ++i) term *= v2;
    sum += term;
  }
  return sum * std::pow(1.0 / intervals, basis.dim());
}

double lp_norm(const SpectralField& f, int p) { return std::pow(lp_norm_power(f, p), 1.0 / p); }

}  // namespace rdspde
