#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Seeded randomness helpers.  std::mt19937_64 has a fixed cross-platform
// bitstream, but the std::* distributions do not, so the mappings from raw
// bits to floats live here and never change.

namespace warpcap {

// Uniform in [0, 1) using the top 53 bits of one 64-bit draw.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform in [lo, hi).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

// Standard normal via Box-Muller (two draws per sample, no cached state).
inline double standard_normal(std::mt19937_64& gen) {
  double u1 = uniform01(gen);
  if (u1 < 1e-300) u1 = 1e-300;  // guard log(0)
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace warpcap
