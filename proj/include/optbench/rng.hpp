#pragma once

#include <cstdint>
#include <string_view>

namespace optbench {

// Deterministic splitmix64 generator. Used for every random draw in the
// harness so results are stable across platforms and standard-library
// versions (std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, no caching so the draw count stays predictable.
  double normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Stable 64-bit mixing helpers for deriving sub-seeds.
std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_str(std::string_view s);

}  // namespace optbench
