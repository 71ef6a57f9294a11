#include "rdspde/stats.hpp"

#include <cmath>
#include <vector>

#include "rdspde/errors.hpp"

namespace rdspde {

Estimate estimate_mean(std::span<const double> values) {
  Estimate out;
  out.samples = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double n = static_cast<double>(values.size());
  out.std_error = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

Estimate estimate_batch_means(std::span<const double> values, std::size_t batches) {
  if (batches < 2 || values.size() < 2 * batches) return estimate_mean(values);
  const std::size_t per = values.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) sum += values[i];
    means[b] = sum / static_cast<double>(per);
  }
  Estimate out = estimate_mean(means);
  // Report the full-series mean; the tail past the last full batch is tiny.
  out.mean = estimate_mean(values).mean;
  out.samples = values.size();
  return out;
}

Estimate difference(const Estimate& a, const Estimate& b) {
  return Estimate{a.mean - b.mean, combined_std_error(a.std_error, b.std_error),
                  std::min(a.samples, b.samples)};
}

double combined_std_error(double a, double b) { return std::sqrt(a * a + b * b); }

bool within_sigmas(double value, double target, double std_error, double sigmas) {
  return std::abs(value - target) <= sigmas * std_error;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("regression needs matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace rdspde
