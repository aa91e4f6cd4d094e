#pragma once

#include <cstdint>

namespace conevex {

// Counter-based stream: the k-th draw depends only on (seed, stream, k),
// so Monte Carlo results do not depend on how samples are split across threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) {
  std::uint64_t h = splitmix64(seed ^ splitmix64(stream * 0x632be59bd9b4e019ULL + k));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace conevex
