#pragma once
// Time-resolved coincidence analysis on frozen tag streams: start/stop
// delay histograms, peak and window selection, windowed four-fold counting,
// visibility and the herald-conditioned g2_ex and chi estimators.
//
// A window centered at offset c with width w covers [c - w/2, c - w/2 + w)
// relative to the D1 start tag.

#include <cstdint>
#include <utility>
#include <vector>

#include "hom/core.hpp"
#include "hom/histogram.hpp"
#include "hom/tags.hpp"

namespace hom {

struct CoincidenceQuery {
  Channel start_channel = Channel::D1;
  std::vector<std::pair<Channel, Picoseconds>> stop_channels;  // (detector, window center)
  Picoseconds window_width = 80;

  void validate() const;
};

// Number of start tags with at least one tag in every stop window.
std::uint64_t count_coincidences(TagStream const& tags, CoincidenceQuery const& query);

// Stop delays in [origin, origin + span) for every start tag.
Histogram delay_histogram(TagStream const& tags, Channel start, Channel stop,
                          Picoseconds bin_width, Picoseconds span, Picoseconds origin = 0);

struct Condition {
  Channel channel = Channel::D2;
  Picoseconds delay = 0;
  Picoseconds width = 80;
};

// As delay_histogram, counting only start tags with a tag of the condition
// channel inside its window.
Histogram conditioned_histogram(TagStream const& tags, Channel start, Condition const& condition,
                                Channel target, Picoseconds bin_width, Picoseconds span,
                                Picoseconds origin = 0);

// Peak centers (ps) of a start/stop histogram: runs of bins whose box-smoothed
// count exceeds median + rel_threshold * (max - median), each reported at its
// count-weighted mean.
std::vector<double> find_peaks(Histogram const& hist, int smooth_bins = 5, double rel_threshold = 0.3);

// True when L' (at t1) and R (at path_delay) are at least 5 widths apart.
bool t1_separates(Picoseconds path_delay, Picoseconds t1, Picoseconds width);

// Fits R near path_delay and L' near t1 in the t1-conditioned start/stop
// histogram. x = R center, y = L' center, t0 = t1 + (x - y). Throws
// ConfigError if t1 violates t1_separates, AnalysisError if a fit fails or
// the fitted peaks are closer than 2 widths.
WindowConfig select_windows(Histogram const& conditioned, Picoseconds path_delay, Picoseconds t1,
                            Picoseconds width = 80);

// D1 starts with D2 in the window at dt, D3 in x or y and D4 in x or y.
std::uint64_t count_fourfold(TagStream const& tags, Picoseconds dt, WindowConfig const& windows);

struct VisibilityEstimate {
  double value = 0.0;
  double sigma = 0.0;  // NaN when one_sided
  bool one_sided = false;
};

// V = 1 - c0/c_inf with first-order Poisson error (c0/c_inf) sqrt(1/c0 + 1/c_inf).
VisibilityEstimate visibility(std::uint64_t c0, std::uint64_t c_inf);

// Herald-conditioned window counts. Only D1 starts without a D2 tag in the
// t0 or t1 window contribute; coincidences are tag-pair multiplicities.
struct HeraldedCounts {
  std::uint64_t heralds = 0;
  std::uint64_t d3_x = 0, d4_x = 0, d3_y = 0, d4_y = 0;
  std::uint64_t d34_x = 0;  // sum over heralds of (#D3 in x)(#D4 in x)
};

HeraldedCounts heralded_counts(TagStream const& tags, WindowConfig const& windows);

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

// g2_ex = C134 N1 / (C13 C14) in window x.
Estimate estimate_g2_ex_detailed(TagStream const& tags, WindowConfig const& windows);
double estimate_g2_ex(TagStream const& tags, WindowConfig const& windows);

// chi = off / (2 on - off) with on = window x (R peak) and off = window y,
// which under single heralding holds only stray light.
Estimate estimate_chi_detailed(TagStream const& tags, WindowConfig const& windows);
double estimate_chi(TagStream const& tags, WindowConfig const& windows);

// Full summary: C_inf at t1, C_0 at t0, V, g2_ex, chi and the prediction
// from (g2_ex, chi). Estimators that fail are reported as NaN.
RunSummary summarize(TagStream const& tags, WindowConfig const& windows, double duration_s);

}  // namespace hom
