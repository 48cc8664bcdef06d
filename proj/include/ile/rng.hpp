#pragma once

// Deterministic randomness helpers.  All draws map mt19937_64 output through
// fixed arithmetic (instead of std:: distributions, whose exact sequences are
// implementation defined) so that seeded results are reproducible across
// standard libraries and across thread counts.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace ile::rng {

using Engine = std::mt19937_64;

// Uniform double in [0, 1) with 53 significant bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

// Standard normal via Box-Muller; u1 is kept in (0, 1] to avoid log(0).
inline double normal(Engine& eng) {
  double u1 = (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Integer in [0, n) by multiply-shift; bias is negligible at our ranges.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(eng()) * n) >> 64);
}

// Fisher-Yates with an explicit draw order (std::shuffle is unspecified).
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(eng, i));
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<std::int32_t> permutation(std::int32_t n, Engine& eng) {
  std::vector<std::int32_t> p(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  shuffle(p, eng);
  return p;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent stream from (seed, tag); used to split one
// experiment seed into graph/split/corruption/solver/init sub-seeds.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ splitmix64(tag));
}

}  // namespace ile::rng
