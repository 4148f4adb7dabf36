#pragma once
// Command implementations shared by the CLI and the tests.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hom/config.hpp"
#include "hom/histogram.hpp"
#include "hom/parametric.hpp"
#include "hom/tags.hpp"

namespace hom {

struct AnalysisOutput {
  RunSummary summary;
  std::vector<std::pair<std::string, Histogram>> histograms;  // file stem, histogram
};

// Histograms, windows (configured or fitted), counts and estimators.
// `duration_s` falls back to the last tag time when absent. For the
// heralded_trials tier the tags are taken to follow the configured frame
// layout, and g2_ex and chi use only the single-herald frames.
AnalysisOutput analyze_tags(TagStream const& tags, RunConfig const& config,
                            std::optional<double> duration_s);

// Summary view of a parametric run: C counts stay zero, the estimates and
// their errors fill the remaining fields and extras.
RunSummary summarize_parametric(ParametricResult const& result, ParametricConfig const& config);

// Writes summary.txt and one CSV per histogram into `dir`.
void write_analysis(std::filesystem::path const& dir, AnalysisOutput const& output);

}  // namespace hom
