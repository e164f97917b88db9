#pragma once

#include <cstddef>
#include <cstdint>

namespace icemest::util {

// SplitMix64, used only to spread seeds into xoshiro state.
struct SplitMix64 {
  std::uint64_t state;
  explicit constexpr SplitMix64(std::uint64_t s) : state(s) {}
  constexpr std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256++ with substreams derived from (seed, stream).  Draws for a
// given pair are identical no matter how work is scheduled across threads,
// which is what makes the simulation and bootstrap reproducible under
// --workers > 1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    SplitMix64 outer(seed);
    std::uint64_t base = outer.next();
    SplitMix64 inner(base ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
    for (auto& word : s_) word = inner.next();
    // All-zero state is invalid for xoshiro; SplitMix64 cannot emit four
    // zeros in a row, so nothing to do here beyond trusting the seeding.
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
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
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform index in [0, n); n must be positive.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Stable derivation of a child seed, for nesting stream families
// (e.g. one seed per simulation iteration, then one stream per unit).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
  SplitMix64 sm(seed ^ (0xbf58476d1ce4e5b9ULL * (key + 1)));
  return sm.next();
}

}  // namespace icemest::util
