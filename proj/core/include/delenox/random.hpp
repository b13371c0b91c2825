#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace delenox {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed, a purpose tag and
/// a list of indices. Every stochastic component of an experiment gets its
/// own stream so results do not depend on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t h = mix64(master);
  for (char ch : tag) h = mix64(h ^ static_cast<unsigned char>(ch));
  for (std::uint64_t i : indices) h = mix64(h ^ mix64(i + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t master, std::string_view tag,
                    std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(master, tag, indices));
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  // Always consumes exactly one draw so the stream layout does not depend on p.
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace delenox
