#pragma once

#include <cstdint>

// Deterministic random number generation with cheap independent substreams.
//
// The generator is splitmix64: a 64-bit counter advanced by a fixed odd
// increment and passed through a strong mixing permutation. Substreams are
// derived by hashing (seed, index), which is injective in the index for a
// fixed seed, so every bootstrap replicate, simulation replication, and
// worker can own its own stream and results never depend on scheduling.
//
// Uniform doubles are taken from the top 53 bits with a half-step offset so
// they lie strictly inside (0, 1); normal variates apply the inverse normal
// CDF to that uniform, which keeps the draw sequence reproducible across
// platforms up to differences in libm-free arithmetic only.

namespace medboot::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// Finalizing mix of splitmix64 (a bijection on 64-bit values).
inline std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for substream `index` of `seed`; injective over index for fixed seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix(seed + (index + 1) * kGamma);
}

// Inverse of the standard normal CDF (Wichura's PPND16 rational
// approximation, accurate to ~1e-16 relative). Requires p in (0, 1).
double normal_ppf(double p);

class Engine {
 public:
  explicit Engine(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on (0, 1), 2^53 equally spaced points, endpoints excluded.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on {0, .., n-1} without modulo bias (Lemire's method).
  std::int32_t next_index(std::int32_t n);

  // Standard normal via the inverse CDF.
  double next_normal() { return normal_ppf(next_uniform()); }

  // Bernoulli(p) as 0/1.
  double next_bernoulli(double p) { return next_uniform() < p ? 1.0 : 0.0; }

 private:
  std::uint64_t state_;
};

}  // namespace medboot::rng
