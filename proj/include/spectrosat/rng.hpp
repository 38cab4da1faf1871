#pragma once

// Counter-based random streams: value i of stream `seed` is a pure function of
// (seed, i), so frames can be generated in any order or in parallel.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace spectrosat {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Independent child seed for frame `index` of a sequence rooted at `base`.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index ^ 0xD1B54A32D192ED03ull));
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(key_ ^ splitmix64(counter));
  }

  /// Uniform in (0, 1), 53-bit resolution.
  constexpr double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal deviate number `i` (Box-Muller on counter pairs).
  double normal(std::uint64_t i) const {
    const std::uint64_t pair = i >> 1;
    const double u1 = uniform(2 * pair);
    const double u2 = uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return (i & 1) ? r * std::sin(theta) : r * std::cos(theta);
  }

 private:
  std::uint64_t key_;
};

}  // namespace spectrosat
