#pragma once

#include <cstdint>
#include <random>

namespace mimo_ee {

using Seed = std::uint64_t;

// Independent sub-streams carved out of one master seed. Each sampling step
// draws from its own stream so that, e.g., changing M leaves user placement
// untouched.
enum class Stream : std::uint64_t {
  placement = 1,
  shadowing = 2,
  fast_fading = 3,
  trial = 4,
  verification = 5,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr Seed derive_seed(Seed parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr Seed derive_seed(Seed parent, Stream stream) noexcept {
  return derive_seed(parent, static_cast<std::uint64_t>(stream));
}

inline std::mt19937_64 make_engine(Seed seed) { return std::mt19937_64(seed); }

}  // namespace mimo_ee
