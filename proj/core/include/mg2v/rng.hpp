#pragma once

#include <cstdint>

namespace mg2v {

inline uint64_t splitmix64(uint64_t& x) {
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// PCG32 (O'Neill). Seedable and splittable: (seed, stream) pairs give
// statistically independent sequences, which is what makes walk generation
// and training reproducible regardless of worker count.
class Pcg32 {
 public:
  Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}

  Pcg32(uint64_t seed, uint64_t stream) {
    inc_ = (stream << 1u) | 1u;
    state_ = 0u;
    next();
    state_ += seed;
    next();
  }

  uint32_t next() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31));
  }

  // Unbiased integer in [0, bound) by rejection.
  uint32_t bounded(uint32_t bound) {
    uint32_t threshold = (-bound) % bound;
    for (;;) {
      uint32_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  uint64_t next64() { return (static_cast<uint64_t>(next()) << 32) | next(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next64() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
  uint64_t inc_;
};

// Substream derivation used throughout: the substream id (e.g. start-node
// index * walks-per-node + walk index) is mixed through splitmix64 and used
// as the PCG stream selector, the seed as the PCG state seed.
inline Pcg32 substream(uint64_t seed, uint64_t id) {
  uint64_t s = id;
  return Pcg32(seed, splitmix64(s));
}

}  // namespace mg2v
