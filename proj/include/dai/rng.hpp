#pragma once

#include <cstdint>
#include <random>

namespace dai {

/// 64-bit Mersenne Twister. Output sequences are fixed by the C++ standard,
/// and the helpers below avoid the library distributions, whose algorithms
/// are implementation-defined.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n), unbiased by rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace dai
