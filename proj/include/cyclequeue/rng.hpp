#pragma once

#include <cstdint>
#include <cstddef>

// xoshiro256** generator with SplitMix64 seeding. Replicate streams are
// derived counter-style: stream i is seeded from the i-th output of the
// SplitMix64 sequence started at the master seed, so any subset of replicate
// indices can be generated in any order (or on any thread) and the draws are
// identical. Not cryptographic.

namespace cq {

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (int i = 0; i < 4; ++i) s_[i] = splitmix64_at(seed, i);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform01_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double exponential(double rate);
  bool bernoulli(double p) { return uniform01() < p; }
  long long poisson(double mean);
  std::size_t uniform_index(std::size_t n);  // uniform on {0, ..., n-1}

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(splitmix64_at(master_seed, index));
}

}  // namespace cq
