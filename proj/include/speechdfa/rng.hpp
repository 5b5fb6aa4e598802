#pragma once

#include <cmath>
#include <cstdint>

namespace speechdfa {

// splitmix64 (Vigna). Tiny, splittable, fully specified 64-bit generator; the
// single pseudo-random source behind every seeded path in the toolkit so that
// output is reproducible from the seed alone. The exact algorithm is written
// out in the README.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe as a log() argument.
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Standard normal draws: trigonometric Box-Muller over splitmix64 uniforms.
// One uniform pair yields two normals; the second is cached.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(rng_.next_unit_open()));
    const double theta = 2.0 * kPi * rng_.next_unit();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  SplitMix64& engine() { return rng_; }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace speechdfa
