#include <algorithm>
#include <cmath>
#include <string>

#include "hom/source.hpp"

namespace hom {
namespace {

void require_non_negative(double v, char const* name) {
  if (!(v >= 0.0)) throw ConfigError(std::string("source.") + name + " must be >= 0");
}

Picoseconds seconds_to_ps(double s) { return static_cast<Picoseconds>(std::llround(s * kPsPerSecond)); }

}  // namespace

void SourceParams::validate() const {
  require_non_negative(pair_rate, "pair_rate");
  require_non_negative(s_mean, "s_mean");
  require_non_negative(g2_s_target, "g2_s_target");
  require_non_negative(n_mean, "n_mean");
  require_non_negative(g2_n_target, "g2_n_target");
  require_non_negative(N_mean, "N_mean");
  if (!(coherence_fwhm > 0.0)) throw ConfigError("source.coherence_fwhm must be > 0");
  if (!(herald_efficiency >= 0.0 && herald_efficiency <= 1.0)) {
    throw ConfigError("source.herald_efficiency must be in [0, 1]");
  }
  if (window_width <= 0) throw ConfigError("source.window_width must be > 0");
  if (noise_modes < 1) throw ConfigError("source.noise_modes must be >= 1");
  // Feasibility of the truncated samplers.
  photon_number_distribution(s_mean, g2_s_target);
  photon_number_distribution(n_mean, g2_n_target);
  photon_number_distribution(N_mean / noise_modes, 1.0);
}

PhotonNumberDistribution photon_number_distribution(double mean, double g2) {
  if (!(mean >= 0.0)) throw ConfigError("photon number mean must be >= 0");
  if (!(g2 >= 0.0)) throw ConfigError("photon number g2 must be >= 0");
  PhotonNumberDistribution d;
  d.p2 = mean * mean * g2 / 2.0;
  d.p1 = mean - mean * mean * g2;
  d.p0 = 1.0 - d.p1 - d.p2;
  auto check = [&](double p, char const* name) {
    if (p < 0.0 || p > 1.0) {
      throw ConfigError("infeasible (mean=" + std::to_string(mean) + ", g2=" + std::to_string(g2) +
                        "): " + name + " = " + std::to_string(p) + " is outside [0, 1]");
    }
  };
  check(d.p2, "p2");
  check(d.p1, "p1");
  check(d.p0, "p0");
  return d;
}

WindowPhotonSampler::WindowPhotonSampler(double mean, double g2)
    : dist_(photon_number_distribution(mean, g2)) {}

int sample_window_photons(double mean, double g2, std::uint64_t seed) {
  Engine rng(seed);
  return WindowPhotonSampler(mean, g2)(rng);
}

PhotonRecord make_signal_photon(SourceParams const& params, Picoseconds t) {
  return PhotonRecord{t, Arm::signal_1541, t, params.coherence_fwhm, Origin::pair_signal, 0};
}

PhotonRecord make_herald_photon(SourceParams const& params, Picoseconds t) {
  return PhotonRecord{t, Arm::herald_1580, t, params.coherence_fwhm, Origin::pair_signal, 0};
}

std::vector<PhotonPair> generate_pairs(SourceParams const& params, Picoseconds begin,
                                       Picoseconds end, Engine& rng) {
  std::vector<PhotonPair> out;
  if (params.pair_rate <= 0.0 || end <= begin) return out;
  double const rate_per_ps = params.pair_rate / kPsPerSecond;
  out.reserve(static_cast<std::size_t>(rate_per_ps * static_cast<double>(end - begin) * 1.05) + 16);
  std::exponential_distribution<double> gap(rate_per_ps);
  std::bernoulli_distribution herald_kept(params.herald_efficiency);
  double t = static_cast<double>(begin);
  while (true) {
    t += gap(rng);
    auto const ti = static_cast<Picoseconds>(std::floor(t));
    if (ti >= end) break;
    out.push_back({make_herald_photon(params, ti), make_signal_photon(params, ti), herald_kept(rng)});
  }
  return out;
}

std::vector<PhotonPair> generate_pair_stream(SourceParams const& params, double duration_s,
                                             std::uint64_t seed) {
  params.validate();
  if (!(duration_s > 0.0)) throw ConfigError("duration must be > 0");
  auto rng = make_engine(seed, Stream::pairs);
  return generate_pairs(params, 0, seconds_to_ps(duration_s), rng);
}

double noise_photon_rate(SourceParams const& params) {
  return 2.0 * params.N_mean / (static_cast<double>(params.window_width) / kPsPerSecond);
}

std::vector<PhotonRecord> inject_stationary_noise(std::vector<PhotonRecord> stream,
                                                  SourceParams const& params, Picoseconds begin,
                                                  Picoseconds end, Engine& rng) {
  if (params.N_mean <= 0.0 || end <= begin) return stream;
  double const mean_count = noise_photon_rate(params) * static_cast<double>(end - begin) / kPsPerSecond;
  auto const n = std::poisson_distribution<std::int64_t>(mean_count)(rng);
  std::uniform_int_distribution<Picoseconds> when(begin, end - 1);
  std::uniform_int_distribution<int> mode(1, params.noise_modes);
  std::vector<PhotonRecord> noise;
  noise.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    Picoseconds const t = when(rng);
    noise.push_back({t, Arm::signal_1541, t, params.coherence_fwhm, Origin::stray, mode(rng)});
  }
  auto by_time = [](PhotonRecord const& a, PhotonRecord const& b) {
    return a.emission_time < b.emission_time;
  };
  std::sort(noise.begin(), noise.end(), by_time);
  std::vector<PhotonRecord> merged;
  merged.reserve(stream.size() + noise.size());
  std::merge(stream.begin(), stream.end(), noise.begin(), noise.end(), std::back_inserter(merged),
             by_time);
  return merged;
}

std::vector<PhotonRecord> inject_stationary_noise(std::vector<PhotonRecord> stream,
                                                  SourceParams const& params, double duration_s,
                                                  std::uint64_t seed) {
  if (params.N_mean < 0.0) throw ConfigError("source.N_mean must be >= 0");
  if (params.N_mean == 0.0) return stream;
  auto rng = make_engine(seed, Stream::noise);
  return inject_stationary_noise(std::move(stream), params, 0, seconds_to_ps(duration_s), rng);
}

}  // namespace hom
