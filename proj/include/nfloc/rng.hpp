#pragma once

#include <complex>
#include <cstdint>

namespace nfloc {

// Deterministic counter-mode generator built on the SplitMix64 finalizer
// (Steele, Lea, Flood 2014): each output is mix64(state), with the state
// advanced by the 64-bit golden-gamma increment. All simulation and
// optimizer randomness flows through this class so that runs are
// reproducible bit-for-bit across platforms, independent of libstdc++'s
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n >= 1. Lemire multiply-shift (bias < 2^-64).
  int uniform_int(int n) {
    const auto wide = static_cast<unsigned __int128>(next_u64()) *
                      static_cast<unsigned __int128>(static_cast<std::uint64_t>(n));
    return static_cast<int>(wide >> 64);
  }

  // Standard normal via Box-Muller; the sine partner is cached.
  double normal();

  // Circularly-symmetric complex Gaussian CN(0,1): E|z|^2 = 1.
  std::complex<double> complex_normal();

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

// Derives an independent substream seed from a parent seed and a tag by
// hash-chaining through the SplitMix64 finalizer. Used for per-trial,
// per-generation, and per-run streams so that parallel schedules cannot
// change the random sequence any consumer sees.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
  return Rng::mix64(seed ^ Rng::mix64(tag + 0x9E3779B97F4A7C15ULL));
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
  return substream(substream(seed, tag_a), tag_b);
}

}  // namespace nfloc
