#include <cmath>
#include <limits>

#include "hom/analysis.hpp"
#include "hom/fitting.hpp"
#include "hom/io.hpp"
#include "hom/report.hpp"
#include "hom/run.hpp"
#include "hom/theory.hpp"

namespace hom {

AnalysisOutput analyze_tags(TagStream const& tags, RunConfig const& config,
                            std::optional<double> duration_s) {
  auto const& a = config.analysis;
  auto const& p = config.pipeline;
  AnalysisOutput out;

  Histogram d13 = delay_histogram(tags, Channel::D1, Channel::D3, a.bin_width, a.span, a.origin);
  Histogram d14 = delay_histogram(tags, Channel::D1, Channel::D4, a.bin_width, a.span, a.origin);
  Condition cond{Channel::D2, p.t1, p.window_width};
  Histogram t1_d3 = conditioned_histogram(tags, Channel::D1, cond, Channel::D3, a.bin_width, a.span, a.origin);
  Histogram t1_d4 = conditioned_histogram(tags, Channel::D1, cond, Channel::D4, a.bin_width, a.span, a.origin);
  cond.delay = p.t0;
  Histogram t0_d3 = conditioned_histogram(tags, Channel::D1, cond, Channel::D3, a.bin_width, a.span, a.origin);

  WindowConfig windows;
  if (config.windows) {
    windows = *config.windows;
  } else {
    Histogram t1_both = t1_d3;
    t1_both.merge(t1_d4);
    windows = select_windows(t1_both, p.circuit.path_delay, p.t1, p.window_width);
  }

  double duration = 0.0;
  if (duration_s) {
    duration = *duration_s;
  } else {
    Picoseconds last = 0;
    for (Channel c : kAllChannels) {
      auto const ch = tags.channel(c);
      if (!ch.empty()) last = std::max(last, ch.back());
    }
    duration = static_cast<double>(last + 1) / kPsPerSecond;
  }
  out.summary = summarize(tags, windows, duration);
  if (config.tier == Tier::heralded_trials) {
    // In t0/t1 frames whose D2 tag misses its window the second pair still
    // feeds window y, so g2_ex and chi come from the single-herald frames.
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    auto& s = out.summary;
    s.g2_ex = s.chi = s.visibility_eq2 = nan;
    s.extras.erase("g2_ex_err");
    s.extras.erase("chi_err");
    s.extras["single_heralds"] = 0.0;
    if (p.single_trials > 0) {
      Picoseconds const frame = p.frame_length > 0 ? p.frame_length : default_frame_length(p);
      Picoseconds const begin = static_cast<Picoseconds>(2 * p.trials) * frame;
      auto const single = summarize(tags.between(begin, std::numeric_limits<Picoseconds>::max()),
                                    windows, duration);
      s.g2_ex = single.g2_ex;
      s.chi = single.chi;
      s.visibility_eq2 = single.visibility_eq2;
      for (auto const* key : {"g2_ex_err", "chi_err", "single_heralds"}) {
        if (auto it = single.extras.find(key); it != single.extras.end()) s.extras[key] = it->second;
      }
    }
  }

  // R peak of the unconditioned D1-D3 histogram.
  try {
    double const c = static_cast<double>(p.circuit.path_delay);
    double const half = std::min(1000.0, 0.5 * static_cast<double>(p.circuit.path_delay));
    GaussianFit const f = fit_gaussian(d13, c - half, c + half);
    out.summary.extras["fit_R_center_ps"] = f.center;
    out.summary.extras["fit_R_fwhm_ps"] = f.fwhm;
  } catch (AnalysisError const&) {
  }

  out.histograms.emplace_back("hist_d1_d3", std::move(d13));
  out.histograms.emplace_back("hist_d1_d4", std::move(d14));
  out.histograms.emplace_back("hist_d1_d3_t1", std::move(t1_d3));
  out.histograms.emplace_back("hist_d1_d4_t1", std::move(t1_d4));
  out.histograms.emplace_back("hist_d1_d3_t0", std::move(t0_d3));
  return out;
}

RunSummary summarize_parametric(ParametricResult const& r, ParametricConfig const& config) {
  RunSummary s;
  s.visibility = r.visibility.value;
  s.visibility_err = r.visibility.sigma;
  s.g2_ex = r.g2_ex.value;
  s.chi = r.chi.value;
  s.visibility_eq2 = visibility_eq2(r.g2_ex.value, r.chi.value);
  s.windows.t0 = 0;
  s.windows.t1 = 0;
  s.extras["trials"] = static_cast<double>(r.trials);
  s.extras["g2_ex_err"] = r.g2_ex.sigma;
  s.extras["chi_err"] = r.chi.sigma;
  s.extras["eq2_residual"] = r.eq2_residual.value;
  s.extras["eq2_residual_err"] = r.eq2_residual.sigma;
  s.extras["p0_per_trial"] = r.p0;
  s.extras["p_inf_per_trial"] = r.p_inf;
  auto const& src = config.source;
  TheoryPoint pt;
  pt.s = src.s_mean;
  pt.n = src.n_mean;
  pt.N = src.N_mean;
  pt.g2_s = src.g2_s_target;
  pt.g2_n = src.g2_n_target;
  pt.nn_corr = independent_noise_nn_corr(src.N_mean, src.noise_modes);
  auto const p = p0_p_inf(pt);
  if (p.p_inf > 0.0 && config.signal_overlap == 1.0) s.extras["theory_visibility"] = visibility(p);
  return s;
}

void write_analysis(std::filesystem::path const& dir, AnalysisOutput const& output) {
  std::filesystem::create_directories(dir);
  for (auto const& [stem, h] : output.histograms) write_histogram_csv(dir / (stem + ".csv"), h);
  write_file_atomic(dir / "summary.txt", format_summary(output.summary));
}

}  // namespace hom
