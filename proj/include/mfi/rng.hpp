#pragma once

#include <cstdint>

namespace mfi {

// SplitMix64. Deterministic across platforms, which keeps seeded optimizer
// restarts and CLI reports byte-identical between runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  std::uint64_t state_;
};

}  // namespace mfi
