#include <algorithm>
#include <cmath>

#include "hom/detection.hpp"

namespace hom {

void DetectorParams::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError("detector.efficiency must be in [0, 1]");
  if (!(jitter_fwhm >= 0.0)) throw ConfigError("detector.jitter_fwhm must be >= 0");
  if (!(dark_rate >= 0.0)) throw ConfigError("detector.dark_rate must be >= 0");
  if (dead_time < 0) throw ConfigError("detector.dead_time must be >= 0");
}

std::vector<Picoseconds> apply_dead_time(std::vector<Picoseconds> tags, Picoseconds dead_time) {
  if (dead_time <= 0 || tags.empty()) return tags;
  std::size_t keep = 1;
  for (std::size_t i = 1; i < tags.size(); ++i) {
    if (tags[i] - tags[keep - 1] >= dead_time) tags[keep++] = tags[i];
  }
  tags.resize(keep);
  return tags;
}

std::vector<Picoseconds> detect(std::span<Picoseconds const> arrivals, DetectorParams const& params,
                                Picoseconds begin, Picoseconds end, Engine& rng) {
  std::vector<Picoseconds> tags;
  tags.reserve(arrivals.size());
  std::uniform_real_distribution<double> unit;
  std::normal_distribution<double> jitter(0.0, params.jitter_fwhm / kFwhmPerSigma);
  for (Picoseconds t : arrivals) {
    if (params.efficiency < 1.0 && !(unit(rng) < params.efficiency)) continue;
    Picoseconds tag = t;
    if (params.jitter_fwhm > 0.0) tag += static_cast<Picoseconds>(std::llround(jitter(rng)));
    if (tag >= 0) tags.push_back(tag);
  }
  if (params.dark_rate > 0.0 && end > begin) {
    double const mean = params.dark_rate * static_cast<double>(end - begin) / kPsPerSecond;
    auto const n = std::poisson_distribution<std::int64_t>(mean)(rng);
    std::uniform_int_distribution<Picoseconds> when(begin, end - 1);
    for (std::int64_t i = 0; i < n; ++i) tags.push_back(when(rng));
  }
  std::sort(tags.begin(), tags.end());
  return apply_dead_time(std::move(tags), params.dead_time);
}

std::vector<Picoseconds> detect(std::span<Picoseconds const> arrivals, DetectorParams const& params,
                                double duration_s, std::uint64_t seed) {
  params.validate();
  Engine rng(seed);
  return detect(arrivals, params, 0, static_cast<Picoseconds>(std::llround(duration_s * kPsPerSecond)),
                rng);
}

}  // namespace hom
