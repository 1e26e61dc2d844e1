#pragma once

// Counter-based random numbers. Every draw is a pure function of a key tuple,
// so results do not depend on evaluation order or thread scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace netmf::rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t a) noexcept {
  return mix64(mix64(seed) ^ a);
}

template <class... Rest>
constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t a, Rest... rest) noexcept {
  return hash(hash(seed, a), static_cast<std::uint64_t>(rest)...);
}

// Uniform in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class... Keys>
constexpr double uniform(std::uint64_t seed, Keys... keys) noexcept {
  return to_unit(hash(seed, static_cast<std::uint64_t>(keys)...));
}

// Standard normal via Box-Muller from two keyed uniforms.
inline double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t base = hash(seed, a, b);
  const double u1 = 1.0 - to_unit(mix64(base ^ 0x5bd1e995ULL));  // (0, 1]
  const double u2 = to_unit(mix64(base ^ 0x27d4eb2fULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace netmf::rng
