#pragma once
// Run configuration: an INI file with sections
//
//   [run]        seed, source_mode (cw | heralded_trials | parametric),
//                duration_s, slice_length_ps, trials, single_trials,
//                frame_length_ps, blocks, signal_overlap, herald_to_d1
//   [source]     pair_rate, coherence_fwhm_ps, s_mean, g2_s, n_mean, g2_n,
//                N_mean, herald_efficiency, window_width_ps, noise_modes
//   [circuit]    path_delay_ps, split_ratio, loss_long, loss_short,
//                grouping_radius_ps, sample_wavepacket
//   [detectors]  efficiency, jitter_fwhm_ps, dark_rate, dead_time_ps
//   [D1]..[D4]   per-detector overrides of [detectors]
//   [windows]    width_ps, t0_ps, t1_ps, x_center_ps, y_center_ps
//   [analysis]   bin_width_ps, span_ps, origin_ps, tags_file
//   [theory]     s, n, N, g2_s, g2_n, eta3, eta4, nn_corr, g2_ex, chi
//
// Unknown sections or keys are errors. All errors are ConfigError with the
// offending `section.key` in the message.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "hom/core.hpp"
#include "hom/parametric.hpp"
#include "hom/pipeline.hpp"
#include "hom/theory.hpp"

namespace hom {

enum class Tier { cw, heralded_trials, parametric };

struct AnalysisSettings {
  Picoseconds bin_width = 20;
  Picoseconds span = 10000;
  Picoseconds origin = -1000;
  std::optional<std::filesystem::path> tags_file;
};

struct TheoryInput {
  std::optional<TheoryPoint> point;
  std::optional<double> g2_ex;
  std::optional<double> chi;
};

struct RunConfig {
  Tier tier = Tier::cw;
  std::optional<std::uint64_t> seed;
  PipelineConfig pipeline;  // source, circuit, detectors, trial settings
  ParametricConfig parametric;
  // Fixed analysis windows. When x/y are absent they are fitted.
  std::optional<WindowConfig> windows;
  AnalysisSettings analysis;
  TheoryInput theory;

  // Seed and tier-specific checks for a simulate run.
  void validate_for_simulation() const;
};

RunConfig parse_config(std::string_view text, std::filesystem::path const& base_dir = {});
RunConfig load_config(std::filesystem::path const& path);

// Duration implied by the simulation settings (cw: duration_s; trials:
// frames * frame length); nullopt for the parametric tier.
std::optional<double> simulated_duration(RunConfig const& config);

std::string_view to_string(Tier tier);

}  // namespace hom
