#pragma once

// Seed splitting. Every random stream in the toolkit is a std::mt19937_64
// seeded from derive_seed(top_seed, stream, index): a SplitMix64 finalizer
// applied to the three inputs in turn. Streams are named by small constants
// so that, e.g., the scene for sample 17 does not depend on how many other
// samples were drawn before it or on which worker drew it.

#include <cstdint>
#include <random>

namespace mot {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
  kScene = 1,
  kLerw = 2,
  kTimeChange = 3,
  kBootstrap = 4,
  kPairs = 5,
  kSynthetic = 6,
};

constexpr std::uint64_t derive_seed(std::uint64_t top, Stream stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(top) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t top, Stream stream, std::uint64_t index) {
  return Rng(derive_seed(top, stream, index));
}

// Uniform values in {0,1,2,3}, two bits at a time from a 64-bit engine.
class DirectionSource {
 public:
  explicit DirectionSource(Rng& rng) : rng_(rng) {}

  int next() {
    if (left_ == 0) {
      bits_ = rng_();
      left_ = 32;
    }
    const int d = static_cast<int>(bits_ & 3U);
    bits_ >>= 2;
    --left_;
    return d;
  }

 private:
  Rng& rng_;
  std::uint64_t bits_ = 0;
  int left_ = 0;
};

}  // namespace mot
