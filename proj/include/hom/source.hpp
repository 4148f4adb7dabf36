#pragma once
// Photon emission for a cw-pumped SPDC source.
//
// Two tiers share SourceParams. The physical tier emits pairs as a Poisson
// process at pair_rate (plus stationary noise photons); the parametric tier
// (hom/parametric.hpp) draws per-window photon numbers directly from
// (s_mean, g2_s_target, n_mean, g2_n_target, N_mean).

#include <cstdint>
#include <vector>

#include "hom/core.hpp"
#include "hom/rng.hpp"

namespace hom {

struct SourceParams {
  double pair_rate = 0.0;         // pairs / s
  double coherence_fwhm = 231.0;  // ps, intensity FWHM of the heralded photon
  double s_mean = 0.0;            // mean photons per window, signal mode
  double g2_s_target = 0.0;
  double n_mean = 0.0;  // mean stray photons per window
  double g2_n_target = 1.0;
  double N_mean = 0.0;  // mean photons per window and input port, all noise modes together
  double herald_efficiency = 1.0;
  Picoseconds window_width = 80;  // converts per-window means to rates
  int noise_modes = 4;            // orthogonal noise modes sharing N_mean

  void validate() const;
};

struct PhotonPair {
  PhotonRecord herald;
  PhotonRecord signal;
  bool heralded = true;  // false when the herald photon was lost
};

//---------------------------------------------------------------------------//
// Moment-matched window photon numbers
//---------------------------------------------------------------------------//

// Distribution on {0, 1, 2} with mean `mean` and <k(k-1)>/mean^2 = g2:
// p2 = mean^2 g2 / 2, p1 = mean - mean^2 g2, p0 = 1 - p1 - p2.
struct PhotonNumberDistribution {
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

// Throws ConfigError naming the probability that leaves [0, 1].
PhotonNumberDistribution photon_number_distribution(double mean, double g2);

class WindowPhotonSampler {
 public:
  WindowPhotonSampler() = default;
  WindowPhotonSampler(double mean, double g2);

  int operator()(Engine& rng) const {
    if (dist_.p1 == 0.0 && dist_.p2 == 0.0) return 0;
    double const u = std::uniform_real_distribution<double>{}(rng);
    if (u < dist_.p2) return 2;
    return u < dist_.p2 + dist_.p1 ? 1 : 0;
  }

  PhotonNumberDistribution const& distribution() const { return dist_; }

 private:
  PhotonNumberDistribution dist_;
};

// One draw with a fresh engine; for repeated draws use WindowPhotonSampler.
int sample_window_photons(double mean, double g2, std::uint64_t seed);

//---------------------------------------------------------------------------//
// Physical tier
//---------------------------------------------------------------------------//

// Poisson pair process over [0, duration). Each pair shares one emission
// time; the herald survives with probability herald_efficiency.
std::vector<PhotonPair> generate_pair_stream(SourceParams const& params, double duration_s,
                                             std::uint64_t seed);

// Same process restricted to [begin, end) with a caller-owned engine.
std::vector<PhotonPair> generate_pairs(SourceParams const& params, Picoseconds begin,
                                       Picoseconds end, Engine& rng);

// A signal-arm photon as emitted together with its herald at time t.
PhotonRecord make_signal_photon(SourceParams const& params, Picoseconds t);
PhotonRecord make_herald_photon(SourceParams const& params, Picoseconds t);

// Photons per second entering the signal arm for the stationary noise:
// 2 * N_mean / window_width, because the first beamsplitter pass gives each
// recombination input port half of them.
double noise_photon_rate(SourceParams const& params);

// Merges stray photons (origin stray, mode_index in 1..noise_modes, uniform
// in time) into a time-ordered signal-arm stream.
std::vector<PhotonRecord> inject_stationary_noise(std::vector<PhotonRecord> stream,
                                                  SourceParams const& params, double duration_s,
                                                  std::uint64_t seed);
std::vector<PhotonRecord> inject_stationary_noise(std::vector<PhotonRecord> stream,
                                                  SourceParams const& params, Picoseconds begin,
                                                  Picoseconds end, Engine& rng);

}  // namespace hom
