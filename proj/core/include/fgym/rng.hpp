#pragma once

// Seeded random streams.
//
// Every random draw in the library comes from a SplitMix64 stream: a 64-bit
// Weyl counter (increment 0x9E3779B97F4A7C15) passed through the Stafford
// "Mix13" finalizer (multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB,
// shifts 30/27/31). Streams are derived by mixing a parent seed with a stream
// key, so draws are reproducible at the integer level in any language that
// implements the same three lines of arithmetic.
//
// Conversions to floating point are IEEE-754 double:
//   uniform01  = (next() >> 11) * 2^-53                       in [0, 1)
//   normal     = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)          (one Box-Muller output per call)

#include <cstdint>
#include <string_view>

namespace fgym::rng {

inline constexpr std::uint64_t kWeylIncrement = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a over the bytes of `text`.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

/// Derives a child seed from a parent seed and a key. Not symmetric.
constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t key) noexcept {
  return mix64(parent ^ mix64(key + kWeylIncrement));
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kWeylIncrement;
    return mix64(state_);
  }

  double uniform01() noexcept;
  /// low + (high - low) * u. Degenerate ranges return `low` exactly.
  double uniform(double low, double high) noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform01() < p; }
  /// Uniform integer in [0, n) by multiply-shift on the upper 32 bits.
  std::uint32_t below(std::uint32_t n) noexcept;

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

inline SplitMix64 stream(std::uint64_t seed, std::uint64_t key) noexcept {
  return SplitMix64(derive(seed, key));
}

}  // namespace fgym::rng
