#pragma once

#include <cstdint>
#include <random>

namespace aoi {

/// splitmix64 finalizer; used to expand one top-level seed into independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// [0, 1) with 53 random bits. Unlike std::uniform_real_distribution the
/// sequence is identical on every standard library.
inline double unit_uniform(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

/// Uniform integer in [lo, hi] by rejection, again library-independent.
inline int uniform_int(std::mt19937_64& engine, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % span;
  std::uint64_t draw = engine();
  while (draw >= limit) draw = engine();
  return lo + static_cast<int>(draw % span);
}

}  // namespace aoi
