#pragma once

#include <cstdint>
#include <limits>

namespace elemodds {

struct RngSeed {
  std::uint64_t value = 0;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256** generator.
///
/// Substreams: the generator for (seed, a, b) is seeded with
/// mix64(mix64(mix64(seed) ^ a) ^ b) and its four state words are the next
/// four SplitMix64 outputs. Every independent unit of work (a trial, or a
/// (row, trial) cell) gets its own substream, so results never depend on
/// the order in which units run.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      word = mix64(x);
      x += 0x9e3779b97f4a7c15ULL;
    }
  }

  static Rng substream(RngSeed seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return Rng(mix64(mix64(mix64(seed.value) ^ a) ^ b));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace elemodds
