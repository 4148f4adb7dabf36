#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hom/analysis.hpp"
#include "hom/fitting.hpp"
#include "hom/theory.hpp"

namespace hom {
namespace {

// Counts tags in [s + lo, s + lo + width) for non-decreasing s.
class WindowCursor {
 public:
  WindowCursor(std::span<Picoseconds const> tags, Picoseconds center, Picoseconds width)
      : tags_(tags), lo_offset_(center - width / 2), width_(width) {}

  std::size_t count(Picoseconds start) {
    Picoseconds const lo = start + lo_offset_;
    Picoseconds const hi = lo + width_;
    while (first_ < tags_.size() && tags_[first_] < lo) ++first_;
    if (last_ < first_) last_ = first_;
    while (last_ < tags_.size() && tags_[last_] < hi) ++last_;
    return last_ - first_;
  }

 private:
  std::span<Picoseconds const> tags_;
  Picoseconds lo_offset_;
  Picoseconds width_;
  std::size_t first_ = 0;
  std::size_t last_ = 0;
};

void check_binning(Picoseconds bin_width, Picoseconds span) {
  if (bin_width <= 0) throw ConfigError("histogram bin_width must be > 0");
  if (span <= 0) throw ConfigError("histogram span must be > 0");
}

Histogram make_histogram(Picoseconds bin_width, Picoseconds span, Picoseconds origin) {
  check_binning(bin_width, span);
  auto const bins = static_cast<std::size_t>((span + bin_width - 1) / bin_width);
  return Histogram(bin_width, origin, bins);
}

}  // namespace

void CoincidenceQuery::validate() const {
  if (window_width <= 0) throw ConfigError("coincidence query: window_width must be > 0");
  std::set<Channel> seen;
  for (auto const& [c, center] : stop_channels) {
    if (!seen.insert(c).second) {
      throw ConfigError("coincidence query: stop channel " + std::string(to_string(c)) + " repeated");
    }
  }
}

std::uint64_t count_coincidences(TagStream const& tags, CoincidenceQuery const& query) {
  query.validate();
  std::vector<WindowCursor> cursors;
  for (auto const& [c, center] : query.stop_channels) {
    cursors.emplace_back(tags.channel(c), center, query.window_width);
  }
  std::uint64_t n = 0;
  for (Picoseconds s : tags.channel(query.start_channel)) {
    bool all = true;
    for (auto& cur : cursors) all = (cur.count(s) > 0) && all;
    if (all) ++n;
  }
  return n;
}

Histogram delay_histogram(TagStream const& tags, Channel start, Channel stop,
                          Picoseconds bin_width, Picoseconds span, Picoseconds origin) {
  Histogram h = make_histogram(bin_width, span, origin);
  auto const stops = tags.channel(stop);
  std::size_t first = 0, last = 0;
  for (Picoseconds s : tags.channel(start)) {
    Picoseconds const lo = s + origin;
    Picoseconds const hi = lo + h.span();
    while (first < stops.size() && stops[first] < lo) ++first;
    if (last < first) last = first;
    while (last < stops.size() && stops[last] < hi) ++last;
    h.accumulate_delays(stops.subspan(first, last - first), s);
  }
  return h;
}

Histogram conditioned_histogram(TagStream const& tags, Channel start, Condition const& condition,
                                Channel target, Picoseconds bin_width, Picoseconds span,
                                Picoseconds origin) {
  if (condition.width <= 0) throw ConfigError("condition width must be > 0");
  Histogram h = make_histogram(bin_width, span, origin);
  WindowCursor cond(tags.channel(condition.channel), condition.delay, condition.width);
  auto const stops = tags.channel(target);
  std::size_t first = 0, last = 0;
  for (Picoseconds s : tags.channel(start)) {
    if (cond.count(s) == 0) continue;
    Picoseconds const lo = s + origin;
    Picoseconds const hi = lo + h.span();
    while (first < stops.size() && stops[first] < lo) ++first;
    if (last < first) last = first;
    while (last < stops.size() && stops[last] < hi) ++last;
    h.accumulate_delays(stops.subspan(first, last - first), s);
  }
  return h;
}

std::vector<double> find_peaks(Histogram const& hist, int smooth_bins, double rel_threshold) {
  if (smooth_bins < 1) throw ConfigError("find_peaks: smooth_bins must be >= 1");
  auto const counts = hist.counts();
  std::size_t const n = counts.size();
  std::vector<double> smooth(n, 0.0);
  auto const half = static_cast<std::ptrdiff_t>(smooth_bins / 2);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    int used = 0;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      auto const j = static_cast<std::ptrdiff_t>(i) + k;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      sum += static_cast<double>(counts[static_cast<std::size_t>(j)]);
      ++used;
    }
    smooth[i] = sum / used;
  }
  std::vector<double> peaks;
  if (n == 0) return peaks;
  std::vector<double> sorted = smooth;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  double const median = sorted[n / 2];
  double const top = *std::max_element(smooth.begin(), smooth.end());
  if (!(top > median)) return peaks;
  double const threshold = median + rel_threshold * (top - median);
  for (std::size_t i = 0; i < n;) {
    if (smooth[i] <= threshold) {
      ++i;
      continue;
    }
    double w = 0.0, m = 0.0;
    for (; i < n && smooth[i] > threshold; ++i) {
      w += static_cast<double>(counts[i]);
      m += static_cast<double>(counts[i]) * hist.bin_center(i);
    }
    if (w > 0.0) peaks.push_back(m / w);
  }
  return peaks;
}

bool t1_separates(Picoseconds path_delay, Picoseconds t1, Picoseconds width) {
  return std::abs(path_delay - t1) >= 5 * width;
}

WindowConfig select_windows(Histogram const& conditioned, Picoseconds path_delay, Picoseconds t1,
                            Picoseconds width) {
  if (width <= 0) throw ConfigError("select_windows: width must be > 0");
  if (!t1_separates(path_delay, t1, width)) {
    throw ConfigError("select_windows: t1 = " + std::to_string(t1) +
                      " ps puts L' within 5 window widths of R at " + std::to_string(path_delay) +
                      " ps");
  }
  double const sep = static_cast<double>(std::abs(path_delay - t1));
  double const half = std::min(sep / 2.0, 1000.0);
  auto fit_near = [&](double expected, char const* name) {
    try {
      GaussianFit const f = fit_gaussian(conditioned, expected - half, expected + half);
      if (std::abs(f.center - expected) > half) {
        throw AnalysisError("fitted center " + std::to_string(f.center) + " ps left the search range");
      }
      return f;
    } catch (AnalysisError const& e) {
      throw AnalysisError(std::string("select_windows: peak ") + name + " not resolvable: " + e.what());
    }
  };
  GaussianFit const r = fit_near(static_cast<double>(path_delay), "R");
  GaussianFit const lp = fit_near(static_cast<double>(t1), "L'");
  if (std::abs(r.center - lp.center) < 2.0 * static_cast<double>(width)) {
    throw AnalysisError("select_windows: peaks R and L' closer than 2 window widths");
  }
  WindowConfig w;
  w.width = width;
  w.x_center = static_cast<Picoseconds>(std::llround(r.center));
  w.y_center = static_cast<Picoseconds>(std::llround(lp.center));
  w.t1 = t1;
  w.t0 = t1 + (w.x_center - w.y_center);
  w.validate();
  return w;
}

std::uint64_t count_fourfold(TagStream const& tags, Picoseconds dt, WindowConfig const& windows) {
  windows.validate();
  auto const w = windows.width;
  WindowCursor d2(tags.channel(Channel::D2), dt, w);
  WindowCursor d3x(tags.channel(Channel::D3), windows.x_center, w);
  WindowCursor d3y(tags.channel(Channel::D3), windows.y_center, w);
  WindowCursor d4x(tags.channel(Channel::D4), windows.x_center, w);
  WindowCursor d4y(tags.channel(Channel::D4), windows.y_center, w);
  std::uint64_t n = 0;
  for (Picoseconds s : tags.channel(Channel::D1)) {
    bool const herald = d2.count(s) > 0;
    bool const three = (d3x.count(s) + d3y.count(s)) > 0;
    bool const four = (d4x.count(s) + d4y.count(s)) > 0;
    if (herald && three && four) ++n;
  }
  return n;
}

VisibilityEstimate visibility(std::uint64_t c0, std::uint64_t c_inf) {
  if (c_inf == 0) throw AnalysisError("visibility: C_inf is zero");
  double const ratio = static_cast<double>(c0) / static_cast<double>(c_inf);
  VisibilityEstimate v;
  v.value = 1.0 - ratio;
  if (c0 == 0) {
    v.one_sided = true;
    v.sigma = std::numeric_limits<double>::quiet_NaN();
  } else {
    v.sigma = ratio * std::sqrt(1.0 / static_cast<double>(c0) + 1.0 / static_cast<double>(c_inf));
  }
  return v;
}

HeraldedCounts heralded_counts(TagStream const& tags, WindowConfig const& windows) {
  windows.validate();
  auto const w = windows.width;
  WindowCursor d2_t0(tags.channel(Channel::D2), windows.t0, w);
  WindowCursor d2_t1(tags.channel(Channel::D2), windows.t1, w);
  WindowCursor d3x(tags.channel(Channel::D3), windows.x_center, w);
  WindowCursor d3y(tags.channel(Channel::D3), windows.y_center, w);
  WindowCursor d4x(tags.channel(Channel::D4), windows.x_center, w);
  WindowCursor d4y(tags.channel(Channel::D4), windows.y_center, w);
  HeraldedCounts c;
  for (Picoseconds s : tags.channel(Channel::D1)) {
    bool const paired = (d2_t0.count(s) + d2_t1.count(s)) > 0;
    auto const n3x = d3x.count(s), n3y = d3y.count(s), n4x = d4x.count(s), n4y = d4y.count(s);
    if (paired) continue;
    ++c.heralds;
    c.d3_x += n3x;
    c.d3_y += n3y;
    c.d4_x += n4x;
    c.d4_y += n4y;
    c.d34_x += n3x * n4x;
  }
  return c;
}

Estimate estimate_g2_ex_detailed(TagStream const& tags, WindowConfig const& windows) {
  HeraldedCounts const c = heralded_counts(tags, windows);
  if (c.heralds == 0) throw AnalysisError("estimate_g2_ex: no single-herald D1 starts");
  if (c.d3_x == 0 || c.d4_x == 0) throw AnalysisError("estimate_g2_ex: no D1-D3 or D1-D4 counts in window x");
  double const n1 = static_cast<double>(c.heralds);
  double const c13 = static_cast<double>(c.d3_x), c14 = static_cast<double>(c.d4_x);
  double const c134 = static_cast<double>(c.d34_x);
  Estimate e;
  e.value = c134 * n1 / (c13 * c14);
  double const rel2 = (c134 > 0 ? 1.0 / c134 : 1.0) + 1.0 / c13 + 1.0 / c14;
  e.sigma = (c134 > 0 ? e.value : n1 / (c13 * c14)) * std::sqrt(rel2);
  return e;
}

double estimate_g2_ex(TagStream const& tags, WindowConfig const& windows) {
  return estimate_g2_ex_detailed(tags, windows).value;
}

Estimate estimate_chi_detailed(TagStream const& tags, WindowConfig const& windows) {
  HeraldedCounts const c = heralded_counts(tags, windows);
  double const on = static_cast<double>(c.d3_x + c.d4_x);
  double const off = static_cast<double>(c.d3_y + c.d4_y);
  if (on == 0.0) throw AnalysisError("estimate_chi: no counts in the on-peak window");
  double const den = 2.0 * on - off;
  if (!(den > 0.0)) throw AnalysisError("estimate_chi: off-peak counts exceed twice the on-peak counts");
  Estimate e;
  e.value = off / den;
  // d chi/d off = 2 on / den^2, d chi/d on = -2 off / den^2
  e.sigma = 2.0 * std::sqrt(on * on * off + off * off * on) / (den * den);
  return e;
}

double estimate_chi(TagStream const& tags, WindowConfig const& windows) {
  return estimate_chi_detailed(tags, windows).value;
}

RunSummary summarize(TagStream const& tags, WindowConfig const& windows, double duration_s) {
  windows.validate();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  RunSummary r;
  r.windows = windows;
  r.duration_s = duration_s;
  for (Channel c : kAllChannels) r.singles[index_of(c)] = tags.size(c);
  r.c_inf = count_fourfold(tags, windows.t1, windows);
  r.c_0 = count_fourfold(tags, windows.t0, windows);
  if (r.c_inf > 0) {
    auto const v = visibility(r.c_0, r.c_inf);
    r.visibility = v.value;
    r.visibility_err = v.sigma;
  } else {
    r.visibility = nan;
    r.visibility_err = nan;
  }
  r.g2_ex = nan;
  r.chi = nan;
  r.visibility_eq2 = nan;
  try {
    auto const g = estimate_g2_ex_detailed(tags, windows);
    r.g2_ex = g.value;
    r.extras["g2_ex_err"] = g.sigma;
  } catch (AnalysisError const&) {
  }
  try {
    auto const x = estimate_chi_detailed(tags, windows);
    r.chi = x.value;
    r.extras["chi_err"] = x.sigma;
  } catch (AnalysisError const&) {
  }
  if (std::isfinite(r.g2_ex) && std::isfinite(r.chi) && r.chi >= 0.0) {
    r.visibility_eq2 = visibility_eq2(r.g2_ex, r.chi);
  }
  auto const hc = heralded_counts(tags, windows);
  r.extras["single_heralds"] = static_cast<double>(hc.heralds);
  return r;
}

}  // namespace hom
