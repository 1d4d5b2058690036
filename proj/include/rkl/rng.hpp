#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rkl/vec.hpp"

namespace rkl {

/// splitmix64 step; used to derive independent child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with hand-rolled uniform/normal draws so streams are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  /// Uniform in (0, 1].
  double uniform_open() noexcept { return 1.0 - uniform(); }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(uniform_open()));
    double a = kTwoPi * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec unit_vector(int n) {
    Vec v(n);
    double r = 0.0;
    while (r < 1e-12) {
      for (int i = 0; i < n; ++i) v[i] = normal();
      r = v.norm();
    }
    return v * (1.0 / r);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rkl
