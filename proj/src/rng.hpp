#pragma once

#include <cstdint>

namespace vinecop::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform in (0, 1) determined only by (seed, row, column).
inline double counter_uniform(std::uint64_t seed, std::uint64_t row, std::uint64_t column) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ row);
  h = splitmix64(h ^ (column * 0xd6e8feb86659fd93ULL));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace vinecop::detail
