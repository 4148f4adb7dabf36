#pragma once
// Parametric Monte Carlo: per-window photon numbers drawn directly from
// (s, g2_s, n, g2_n, N) and pushed through the exact beamsplitter
// transformation. Detection is linear in photon number, so accumulated
// n3 * n4 products estimate the two-fold probabilities up to eta3 * eta4.
//
// Every trial simulates three independent frames:
//   zero delay   signal in 1x and 2x, stray in 1y and 2y
//   long delay   signal in 1x and 2y, stray in 2x and 1y
//   D1 only      signal in 1x, stray in 2x, 1y and 2y
// Noise modes l = 1..L add mean N/L (g2 = 1) to every input port and window.

#include <cstdint>
#include <vector>

#include "hom/analysis.hpp"
#include "hom/core.hpp"
#include "hom/source.hpp"
#include "hom/tags.hpp"

namespace hom {

struct ParametricConfig {
  SourceParams source;  // s_mean, g2_s_target, n_mean, g2_n_target, N_mean, noise_modes
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int blocks = 100;  // jackknife blocks
  // Squared overlap between the two signal modes; 0 gives the classical limit.
  double signal_overlap = 1.0;

  void validate() const;
};

struct ParametricResult {
  std::uint64_t trials = 0;
  Estimate visibility;
  Estimate g2_ex;  // C34 / (S3 S4), D1-only frames, window x
  Estimate chi;    // off / (2 on - off), D1-only frames
  // V - visibility_eq2(g2_ex, chi), with its jackknife error.
  Estimate eq2_residual;
  // Per-trial means (units of eta3 * eta4 or eta).
  double p0 = 0.0;
  double p_inf = 0.0;
  double c34 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
  double on = 0.0;
  double off = 0.0;
};

ParametricResult run_parametric(ParametricConfig const& config);

// D1-only frames as a tag stream: one D1 tag per frame at frame_index *
// frame_length and one D3/D4 tag per output photon at the window centers.
// No D2 tags, so every frame is a single-herald start for the estimators.
TagStream parametric_d1_frames(ParametricConfig const& config, WindowConfig const& windows,
                               Picoseconds frame_length = 10000);

}  // namespace hom
