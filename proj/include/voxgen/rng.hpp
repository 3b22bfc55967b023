#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "voxgen/common.hpp"

namespace voxgen {

// Deterministic RNG. mt19937_64 is fully specified by the standard; the
// uniform/normal transforms are implemented here rather than with
// std::*_distribution, whose output is implementation-defined. This keeps
// sampled streams reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    std::uint64_t limit = ~0ULL - ~0ULL % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller, one spare cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform direction on the unit sphere.
  void unit_vector(double out[3]) {
    double n2;
    do {
      out[0] = normal();
      out[1] = normal();
      out[2] = normal();
      n2 = out[0] * out[0] + out[1] * out[1] + out[2] * out[2];
    } while (n2 < 1e-12);
    double inv = 1.0 / std::sqrt(n2);
    out[0] *= inv;
    out[1] *= inv;
    out[2] *= inv;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace voxgen
