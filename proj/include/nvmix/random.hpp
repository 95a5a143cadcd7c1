#pragma once

// Seedable, splittable random streams with a fixed, platform-independent output sequence.
//
// Engine: std::mt19937_64 (its output sequence is fixed by the standard). Distributions are
// implemented here rather than taken from <random>, whose algorithms are implementation-defined.
//   uniform : top 53 bits of one engine draw, scaled into [0, 1)
//   normal  : Box-Muller; each pair of uniforms yields a cosine and a sine variate, in that order
// Streams for a seed are derived as splitmix64(seed, stream id), never by sharing an engine.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nvmix {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of an independent child stream.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_below() { return 1.0 - uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_below()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nvmix
