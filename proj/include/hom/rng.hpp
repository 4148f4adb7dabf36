#pragma once
// Deterministic seeding. Every random stream in the simulator is a
// mt19937_64 seeded from (run seed, stream id, slice index) through
// SplitMix64, so replays are bit-identical and slices are independent.

#include <cstdint>
#include <random>

namespace hom {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream ids keep the per-purpose generators apart.
enum class Stream : std::uint64_t {
  pairs = 1,
  heralds = 2,
  noise = 3,
  circuit = 4,
  detect_d1 = 10,
  detect_d2 = 11,
  detect_d3 = 12,
  detect_d4 = 13,
  parametric = 20,
  trials = 21,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t slice = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) + slice);
}

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t slice = 0) {
  return Engine{derive_seed(seed, stream, slice)};
}

}  // namespace hom
