// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace geotomo {

/// SplitMix64 (Steele, Lea, Flood 2014). Every random draw in the library
/// comes from this generator so that streams are reproducible from a single
/// 64-bit seed in any language.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  constexpr double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

 private:
  std::uint64_t state_;
};

}  // namespace geotomo
