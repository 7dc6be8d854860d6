#pragma once

#include <cmath>
#include <cstdint>

namespace lfdbench {

// Deterministic random source built on PCG32 (O'Neill). A stream is fully
// determined by (seed, stream_id); child streams are derived from the stored
// seed and a caller-supplied key, never from the current draw position, so the
// same derivation yields the same stream no matter how much the parent has
// been consumed. This is what makes trial-parallel runs bit-reproducible.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed) {
    inc_ = (stream_id << 1u) | 1u;
    state_ = 0u;
    next_u32();
    state_ += split_mix(seed + 0x9e3779b97f4a7c15ull);
    next_u32();
  }

  // Independent stream keyed on (this stream's seed, key).
  RandomSource child(std::uint64_t key) const {
    const std::uint64_t derived = split_mix(seed_ ^ split_mix(key + 0x632be59bd9b4e019ull));
    return RandomSource(derived, split_mix(derived + key));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ull + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased draw from {0, ..., n-1} (Lemire rejection).
  std::uint32_t uniform_int(std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
    auto low = static_cast<std::uint32_t>(m);
    if (low < n) {
      const std::uint32_t threshold = (0u - n) % n;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next_u32()) * n;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  // Standard normal via Box-Muller; draws two uniforms per call.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t split_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Stream for one trial of a many-trial run.
inline RandomSource trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  return RandomSource(master_seed).child(trial_index);
}

}  // namespace lfdbench
