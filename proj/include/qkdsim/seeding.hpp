#pragma once

#include <cstdint>
#include <random>

namespace qkdsim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for task `index` under `parent`. Every parallel unit of work
/// (chunk, table row, sweep point) seeds from this, so results never depend
/// on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(parent ^ splitmix64(index ^ 0x6a09e667f3bcc909ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_double(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace qkdsim
