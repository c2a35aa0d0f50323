#pragma once

#include <cstdint>

namespace ccast {

// SplitMix64 generator. Chosen over <random> engines so that streams are
// identical across standard libraries, which keeps artifacts reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  uint32_t next_below(uint32_t n) { return static_cast<uint32_t>(next_u64() % n); }

 private:
  uint64_t state_;
};

// Derives an independent stream for a sub-task (sweep grid point, strategy rng).
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  Rng r(seed ^ (salt * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL));
  return r.next_u64();
}

}  // namespace ccast
