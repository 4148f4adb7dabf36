#pragma once
// Fiber interferometer: first-pass long/short split, round-trip delay and
// the recombining half beamsplitter with partial temporal distinguishability.

#include <cstdint>
#include <span>
#include <vector>

#include "hom/core.hpp"
#include "hom/rng.hpp"

namespace hom {

struct CircuitParams {
  Picoseconds path_delay = 4000;  // long minus short round trip
  double split_ratio = 0.5;       // probability of the long path on the first pass
  double loss_long = 1.0;         // transmittance of the long path
  double loss_short = 1.0;        // transmittance of the short path
  // Photons closer than this at the recombining beamsplitter are grouped and
  // interfere; <= 0 selects default_grouping_radius(mode_fwhm).
  double grouping_radius = 0.0;
  // Draw detection times from the wavepacket profile; off = arrive at center.
  bool sample_wavepacket = true;

  void validate() const;
};

struct BSOutcome {
  int n_out3 = 0;
  int n_out4 = 0;
  double probability = 0.0;
};

// |<psi1|psi2>|^2 for Gaussian wavepackets with intensity FWHM `fwhm`.
double temporal_overlap(double t1, double t2, double fwhm);

// Separation at which temporal_overlap falls to 1e-6.
double default_grouping_radius(double fwhm);

// Exact output distribution of the 50:50 beamsplitter for n_in1 photons in
// one mode and n_in2 photons whose mode has squared overlap `overlap` with
// it. Outcomes with zero probability are omitted; order is by n_out3 desc.
// Throws ConfigError for inputs above 2 photons per port or overlap outside [0,1].
std::vector<BSOutcome> hbs_transform(int n_in1, int n_in2, double overlap);

struct RoutedPhoton {
  PhotonRecord photon;
  Channel port = Channel::D3;  // D3 or D4
  Picoseconds arrival = 0;
  bool long_path = false;
};

// Routes time-ordered signal-arm photons through the circuit. Result is
// sorted by arrival.
std::vector<RoutedPhoton> route_circuit(std::span<PhotonRecord const> records,
                                        CircuitParams const& params, std::uint64_t seed);
std::vector<RoutedPhoton> route_circuit(std::span<PhotonRecord const> records,
                                        CircuitParams const& params, Engine& rng);

// Herald arm: the 1580 nm photons meet a 50:50 splitter in front of D1/D2.
struct HeraldArrivals {
  std::vector<Picoseconds> d1;
  std::vector<Picoseconds> d2;
};

HeraldArrivals split_heralds(std::span<PhotonRecord const> heralds, double ratio_to_d1,
                             Engine& rng);

}  // namespace hom
