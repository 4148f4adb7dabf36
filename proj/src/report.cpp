#include <charconv>
#include <cmath>
#include <sstream>

#include "hom/io.hpp"
#include "hom/report.hpp"
#include "hom/theory.hpp"

namespace hom {
namespace {

void line(std::ostringstream& os, std::string_view key, double v) {
  os << key << '=' << format_double(v) << '\n';
}

void line(std::ostringstream& os, std::string_view key, std::int64_t v) {
  os << key << '=' << v << '\n';
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  auto const [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("summary: bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string format_summary(RunSummary const& s) {
  std::ostringstream os;
  line(os, "c_inf", static_cast<std::int64_t>(s.c_inf));
  line(os, "c_0", static_cast<std::int64_t>(s.c_0));
  line(os, "visibility", s.visibility);
  line(os, "visibility_err", s.visibility_err);
  line(os, "g2_ex", s.g2_ex);
  line(os, "chi", s.chi);
  line(os, "visibility_eq2", s.visibility_eq2);
  for (Channel c : kAllChannels) {
    line(os, "singles_" + std::string(to_string(c)), static_cast<std::int64_t>(s.singles[index_of(c)]));
  }
  line(os, "duration_s", s.duration_s);
  line(os, "window_width_ps", s.windows.width);
  line(os, "window_x_ps", s.windows.x_center);
  line(os, "window_y_ps", s.windows.y_center);
  line(os, "window_t0_ps", s.windows.t0);
  line(os, "window_t1_ps", s.windows.t1);
  for (auto const& [k, v] : s.extras) line(os, "extra." + k, v);
  return os.str();
}

RunSummary parse_summary(std::string_view text) {
  RunSummary s;
  std::istringstream is{std::string(text)};
  std::string raw;
  while (std::getline(is, raw)) {
    if (raw.empty() || raw.front() == '#') continue;
    auto const eq = raw.find('=');
    if (eq == std::string::npos) throw ConfigError("summary: line without '=': " + raw);
    std::string const key = raw.substr(0, eq);
    std::string_view const val = std::string_view(raw).substr(eq + 1);
    auto u64 = [&] { return parse_number<std::uint64_t>(key, val); };
    auto ps = [&] { return parse_number<Picoseconds>(key, val); };
    auto dbl = [&] { return parse_number<double>(key, val); };
    if (key == "c_inf") s.c_inf = u64();
    else if (key == "c_0") s.c_0 = u64();
    else if (key == "visibility") s.visibility = dbl();
    else if (key == "visibility_err") s.visibility_err = dbl();
    else if (key == "g2_ex") s.g2_ex = dbl();
    else if (key == "chi") s.chi = dbl();
    else if (key == "visibility_eq2") s.visibility_eq2 = dbl();
    else if (key.starts_with("singles_")) s.singles[index_of(parse_channel(key.substr(8)))] = u64();
    else if (key == "duration_s") s.duration_s = dbl();
    else if (key == "window_width_ps") s.windows.width = ps();
    else if (key == "window_x_ps") s.windows.x_center = ps();
    else if (key == "window_y_ps") s.windows.y_center = ps();
    else if (key == "window_t0_ps") s.windows.t0 = ps();
    else if (key == "window_t1_ps") s.windows.t1 = ps();
    else if (key.starts_with("extra.")) s.extras[key.substr(6)] = dbl();
    else throw ConfigError("summary: unknown key '" + key + "'");
  }
  return s;
}

ReportRows theory_rows(TheoryInput const& input) {
  if (!input.point && !input.chi) {
    throw ConfigError("theory: give s/n/N (and g2 values) or the pair g2_ex, chi");
  }
  ReportRows rows;
  if (input.point) {
    TheoryPoint const& pt = *input.point;
    auto const p = p0_p_inf(pt);
    rows.emplace_back("P0", p.p0);
    rows.emplace_back("P_inf", p.p_inf);
    rows.emplace_back("visibility", p.p_inf > 0.0 ? visibility(p) : std::nan(""));
    double const chi = chi_theory(pt);
    double const g = g2_ex_theory(pt);
    rows.emplace_back("chi", chi);
    rows.emplace_back("g2_ex", g);
    rows.emplace_back("visibility_eq2", visibility_eq2(g, chi));
    if (pt.N == 0.0 && pt.s > 0.0) rows.emplace_back("visibility_eq1", visibility_eq1(pt.s, pt.n, pt.g2_s, pt.g2_n));
  }
  if (input.chi) {
    rows.emplace_back("input_g2_ex", *input.g2_ex);
    rows.emplace_back("input_chi", *input.chi);
    rows.emplace_back("input_visibility_eq2", visibility_eq2(*input.g2_ex, *input.chi));
  }
  return rows;
}

std::string format_rows(ReportRows const& rows) {
  std::ostringstream os;
  for (auto const& [k, v] : rows) line(os, k, v);
  return os.str();
}

}  // namespace hom
