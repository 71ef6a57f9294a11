#include "rdspde/rng.hpp"

#include "rdspde/errors.hpp"

namespace rdspde {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0xd1b54a32d192ed03ULL));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(derive_stream_seed(seed, stream)) {}

void RandomStream::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal_(engine_);
}

std::uint64_t StreamRange::at(std::uint64_t index) const {
  if (index >= size) throw DomainError("stream index outside its range");
  return base + index;
}

StreamRange StreamRange::split(std::uint64_t index, std::uint64_t parts) const {
  if (parts == 0 || index >= parts) throw DomainError("invalid stream range split");
  const std::uint64_t width = size / parts;
  if (width == 0) throw DomainError("stream range exhausted");
  return StreamRange{base + index * width, width};
}

}  // namespace rdspde
