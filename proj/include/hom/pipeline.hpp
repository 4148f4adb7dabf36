#pragma once
// Physical-tier run: pairs -> herald split -> circuit -> four detectors.
//
// cw mode simulates a stationary stream over [0, duration) in independent
// time slices. heralded_trials mode builds separated frames, each holding a
// pair heralded at D1 at the frame origin and, for t0/t1 frames, a second
// pair heralded at D2 at a uniformly spread offset around t0 or t1, on top of
// the usual background pairs and noise. Frames make four-fold statistics
// affordable.

#include <array>
#include <cstdint>

#include "hom/core.hpp"
#include "hom/detection.hpp"
#include "hom/optics.hpp"
#include "hom/source.hpp"
#include "hom/tags.hpp"

namespace hom {

enum class SourceMode { cw, heralded_trials };

struct PipelineConfig {
  SourceParams source;
  CircuitParams circuit;
  std::array<DetectorParams, kNumChannels> detectors{};
  double herald_to_d1 = 0.5;  // herald splitter ratio in front of D1/D2
  std::uint64_t seed = 0;
  SourceMode mode = SourceMode::cw;

  // cw
  double duration_s = 1.0;
  Picoseconds slice_length = 1'000'000'000;  // 1 ms

  // heralded_trials
  std::uint64_t trials = 100000;         // frames per delay, t0 and t1 each
  std::uint64_t single_trials = 100000;  // frames with the D1 herald only
  Picoseconds t0 = 4000;
  Picoseconds t1 = 2600;
  Picoseconds window_width = 80;
  Picoseconds frame_length = 0;  // 0 selects a length that isolates frames

  void validate() const;
};

struct SimulationOutput {
  TagStream tags;
  double duration_s = 0.0;
  std::uint64_t frames = 0;  // slices in cw mode
};

SimulationOutput simulate(PipelineConfig const& config);

// Smallest frame length keeping every photon of a frame inside it.
Picoseconds default_frame_length(PipelineConfig const& config);

}  // namespace hom
