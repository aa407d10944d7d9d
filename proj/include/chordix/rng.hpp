#pragma once

#include <cstdint>
#include <random>

#include "chordix/vec.hpp"

namespace chordix {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x9E3779B97F4A7C15ULL));
}

}  // namespace detail

/// Reproducible random stream: the same (seed, stream_id) yields the same
/// draw sequence on every run and under every thread count.  Doubles are
/// built from raw engine words, so sequences are toolchain-independent.
class RandomStream {
 public:
  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id), eng_(detail::mix2(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  /// Independent child stream; deterministic function of (seed, stream, i).
  RandomStream substream(std::uint64_t i) const {
    return RandomStream(seed_, detail::mix2(stream_, i));
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Isotropic unit vector (rejection from the cube, then normalize).
  Vec3 unit_vector() {
    for (;;) {
      const Vec3 v{uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
      const double n2 = norm2(v);
      if (n2 > 1e-12 && n2 <= 1.0) return (1.0 / std::sqrt(n2)) * v;
    }
  }

  /// Uniform point on a disk of given radius; returns (a, b) coordinates.
  void disk_point(double radius, double& a, double& b) {
    for (;;) {
      const double u = uniform(-1.0, 1.0);
      const double v = uniform(-1.0, 1.0);
      if (u * u + v * v <= 1.0) {
        a = radius * u;
        b = radius * v;
        return;
      }
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 eng_;
};

}  // namespace chordix
