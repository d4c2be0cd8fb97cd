#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace capserv {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives a named, independent random stream from the master seed. All
/// randomness in the pipeline flows through these substreams, so any stage
/// can be re-run in isolation and reproduce its draws.
inline std::mt19937_64 substream(std::uint64_t master_seed, std::string_view name) {
  return std::mt19937_64(splitmix64(master_seed ^ fnv1a64(name)));
}

}  // namespace capserv
