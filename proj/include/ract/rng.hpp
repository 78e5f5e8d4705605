#pragma once

// Seed derivation for order-independent random streams. Every stream is a
// pure function of (master seed, path of integers), so replicate b draws the
// same numbers whatever thread runs it and in whatever order.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ract {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Engine make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Engine(derive_seed(master, path));
}

// Stream domains, kept distinct so e.g. data draws never alias permutations.
enum StreamTag : std::uint64_t {
  kPermutationStream = 1,
  kScenarioStream = 2,
  kSampleStream = 3,
  kDatasetSeed = 4,
  kSubsampleStream = 5,
};

}  // namespace ract
