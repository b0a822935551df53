#pragma once

// SplitMix64. Tiny, seedable, and stable across platforms and standard
// libraries; seeded replay must be byte-identical, so no std:: distributions
// anywhere in the project.

#include <cstdint>

namespace podeval {

class splitmix64 {
 public:
  explicit splitmix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on [-1, 1]
  double symmetric() { return 2.0 * uniform01() - 1.0; }

 private:
  std::uint64_t state_;
};

}  // namespace podeval
