#pragma once

#include <cstdint>

namespace dovetail {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen as the project-wide seeded
// generator: 64-bit state, splittable, and bit-exact across platforms, so
// every experiment is reproducible from a single integer seed.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // One fresh draw per bit. Slower than buffering a word but keeps the
  // stream definition trivial to document and replay.
  int next_bit() { return static_cast<int>(next_u64() & 1ull); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Derives an independent child generator; parent state advances.
  SplitMix64 split() { return SplitMix64(next_u64()); }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

// Deterministic per-trial seed schedule: trial i gets the i-th output of a
// SplitMix64 stream seeded with the master seed.
inline uint64_t derive_seed(uint64_t master, uint64_t index) {
  SplitMix64 sm(master);
  uint64_t s = 0;
  for (uint64_t i = 0; i <= index; ++i) s = sm.next_u64();
  return s;
}

}  // namespace dovetail
