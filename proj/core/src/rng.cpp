#include "fgym/rng.hpp"

#include <cmath>
#include <numbers>

namespace fgym::rng {

double SplitMix64::uniform01() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double low, double high) noexcept {
  const double u = uniform01();
  if (low == high) return low;
  return low + (high - low) * u;
}

double SplitMix64::normal() noexcept {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint32_t SplitMix64::below(std::uint32_t n) noexcept {
  const std::uint64_t hi = next() >> 32;
  return static_cast<std::uint32_t>((hi * n) >> 32);
}

}  // namespace fgym::rng
