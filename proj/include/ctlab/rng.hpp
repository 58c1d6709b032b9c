#pragma once

#include <cstdint>

namespace ctlab {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: every (seed, stream, index) triple names an
// independent generator, so results do not depend on how work is scheduled.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) noexcept
      : state_(splitmix64(splitmix64(seed ^ 0x5bd1e995ULL) ^ splitmix64(stream + 0x27d4eb2fULL) ^
                          splitmix64(index * 0x9e3779b97f4a7c15ULL + 1))) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }

  std::uint64_t below(std::uint64_t n) noexcept { return n == 0 ? 0 : next_u64() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace ctlab
