#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gossip {

/// Stateless splitmix64 finalizer; the basis of all seed derivation.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed split: experiment seed -> sweep point -> replication.
/// Every stream in the project is derived through this function, so a master
/// seed fully determines all randomness.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                           std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(master ^ 0x8f1b'5a2d'9c47'e301ULL);
  h = splitmix64(h ^ (a + 1) * 0xd6e8'feb8'6659'fd93ULL);
  h = splitmix64(h ^ (b + 1) * 0xa0761d6478bd642fULL);
  h = splitmix64(h ^ (c + 1) * 0xe703'7ed1'a0b4'28dbULL);
  return h;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

/// Exponential inter-arrival with the given rate (> 0).
inline double sample_exponential(std::mt19937_64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace gossip
