#pragma once

#include <cstdint>

namespace lqgame {

/// splitmix64 output function: bijective mix of a 64-bit counter.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based Gaussian stream. Draw k of the stream identified by
/// (seed, stream_id) depends only on those three integers, so results are
/// bit-identical however paths are scheduled across workers, and reusing a
/// seed reproduces the same noise for common-random-number comparisons.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream_id)
      : base_(mix64(mix64(seed) ^ (0xD1B54A32D192ED03ULL * (stream_id + 1)))) {}

  /// Uniform in (0, 1): never returns an endpoint, safe under log().
  double uniform() {
    const std::uint64_t bits = mix64(base_ + counter_++);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; draws two uniforms every other call.
  double gaussian();

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lqgame
