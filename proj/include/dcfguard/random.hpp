#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dcfguard {

// Thin wrapper over mt19937_64. The mappings to [0,1) and [0,n) are spelled
// out here rather than taken from <random> distributions so traces are
// byte-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint32_t below(std::uint32_t n) {
    const auto wide = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::uint32_t>(wide >> 64);
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dcfguard
