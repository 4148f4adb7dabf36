#pragma once
// SNSPD model: efficiency thinning, Gaussian timing jitter, Poisson dark
// counts and an optional dead time.

#include <cstdint>
#include <span>
#include <vector>

#include "hom/core.hpp"
#include "hom/rng.hpp"

namespace hom {

struct DetectorParams {
  double efficiency = 1.0;
  double jitter_fwhm = 85.0;  // ps
  double dark_rate = 0.0;     // counts / s
  Picoseconds dead_time = 0;

  void validate() const;
};

// Tags for one detector from time-ordered arrivals within [begin, end).
// Dark counts are drawn over the same interval. Output is sorted; tags that
// jitter below zero are dropped.
std::vector<Picoseconds> detect(std::span<Picoseconds const> arrivals, DetectorParams const& params,
                                Picoseconds begin, Picoseconds end, Engine& rng);

std::vector<Picoseconds> detect(std::span<Picoseconds const> arrivals, DetectorParams const& params,
                                double duration_s, std::uint64_t seed);

// Drops tags closer than dead_time to the previous accepted tag.
std::vector<Picoseconds> apply_dead_time(std::vector<Picoseconds> tags, Picoseconds dead_time);

}  // namespace hom
