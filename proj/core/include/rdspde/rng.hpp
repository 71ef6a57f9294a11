#pragma once

#include <cstdint>
#include <span>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace rdspde {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of stream `stream` under master seed `seed`. Distinct streams give
/// statistically independent engines; the mapping is a pure function.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Gaussian source for one stream. Not thread-safe; one per task.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  double normal() { return normal_(engine_); }
  void fill_normal(std::span<double> out);

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

/// Half-open block of stream ids. Checks and estimators carve disjoint
/// sub-blocks out of a parent block so no two tasks ever share a stream.
struct StreamRange {
  std::uint64_t base = 0;
  std::uint64_t size = std::uint64_t{1} << 48;

  std::uint64_t at(std::uint64_t index) const;
  /// The `index`-th of `parts` equal sub-blocks.
  StreamRange split(std::uint64_t index, std::uint64_t parts) const;
};

}  // namespace rdspde
