#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace uavnet {

// splitmix64 finalizer; good avalanche, cheap, and stable across platforms.
inline std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent substream seed from a base seed, a stream tag and an
// optional index (e.g. one GA stream per cluster).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = mix_seed(base);
  h = mix_seed(h ^ (0xc2b2ae3d27d4eb4fULL + stream));
  h = mix_seed(h ^ (0x165667b19e3779f9ULL + index));
  return h;
}

// Deterministic RNG wrapper. std::mt19937_64 output is fully specified by the
// standard; the derived draws below avoid std::uniform_*_distribution and
// std::shuffle, whose results are implementation-defined, so every sequence is
// reproducible bit-for-bit across compilers and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased uniform integer in [0, n); n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;
    const std::uint64_t limit = max - rem;  // accept x <= limit
    std::uint64_t x = engine_();
    while (x > limit) x = engine_();
    return x % n;
  }

  // Uniform int in [lo, hi).
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo)));
  }

  // Fisher-Yates shuffle driven by next_below (deterministic everywhere).
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[next_below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace uavnet
