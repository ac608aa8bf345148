#pragma once

#include <cstdint>

#include "rdcov/normal.hpp"

namespace rdcov {

// splitmix64 finalizer. With the golden-ratio increment below, output n of a
// stream is mix64(seed + (n+1) * kGoldenGamma) -- a pure function of
// (seed, n), so streams can be replayed or split freely.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Per-replication seed derived from (master seed, replication index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * kGoldenGamma);
}

// Counter-based generator: no hidden state beyond (seed, counter).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ + (++counter_) * kGoldenGamma); }

  // Uniform strictly inside (0,1): 53 random bits, offset by half a step.
  double next_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by inverse cdf; keeps replay exact across platforms.
  double next_normal() { return normal_quantile(next_double()); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace rdcov
