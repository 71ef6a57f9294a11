#pragma once

#include <cstddef>
#include <span>

namespace rdspde {

/// Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Sample mean and stderr = sample standard deviation / sqrt(n) for
/// independent draws. Summation runs in index order.
Estimate estimate_mean(std::span<const double> values);

/// Batch-means estimate for a correlated chain: the series is cut into
/// `batches` contiguous blocks and the stderr is taken over block means.
/// Falls back to `estimate_mean` when there are fewer than 2 samples per batch.
Estimate estimate_batch_means(std::span<const double> values, std::size_t batches = 20);

/// Difference a - b of two independent estimates.
Estimate difference(const Estimate& a, const Estimate& b);

double combined_std_error(double a, double b);

/// True when |value - target| <= sigmas * std_error.
bool within_sigmas(double value, double target, double std_error, double sigmas = 3.0);

/// Least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rdspde
