#pragma once

#include <cstdint>

namespace gtg {

// SplitMix64 stream (Vigna's splitmix64 finalizer). Used wherever randomness
// must reproduce bit-for-bit across platforms and compilers: scenario
// synthesis, labeled-frame draws, test instance generation. std::mt19937 with
// std:: distributions is not portable enough for the byte-identical output
// contract, so all draws go through this generator.
//
// Draw primitives, documented because output files depend on them:
//   next_u64()        state += 0x9e3779b97f4a7c15; z = state;
//                     z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//                     z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
//                     return z ^ (z >> 31);
//   next_double()     (next_u64() >> 11) * 2^-53, uniform in [0,1)
//   next_below(n)     unbiased integer in [0,n) by rejection on next_u64()
class SplitMix64 {
public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  uint64_t next_below(uint64_t bound) {
    // rejection keeps the draw unbiased; threshold = 2^64 mod bound
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

private:
  uint64_t state_;
};

}  // namespace gtg
