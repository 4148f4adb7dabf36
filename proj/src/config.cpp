#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hom/config.hpp"
#include "hom/io.hpp"

namespace hom {
namespace {

namespace pt = boost::property_tree;

std::map<std::string, std::set<std::string>> const kSchema{
    {"run",
     {"seed", "source_mode", "duration_s", "slice_length_ps", "trials", "single_trials",
      "frame_length_ps", "blocks", "signal_overlap", "herald_to_d1"}},
    {"source",
     {"pair_rate", "coherence_fwhm_ps", "s_mean", "g2_s", "n_mean", "g2_n", "N_mean",
      "herald_efficiency", "window_width_ps", "noise_modes"}},
    {"circuit",
     {"path_delay_ps", "split_ratio", "loss_long", "loss_short", "grouping_radius_ps",
      "sample_wavepacket"}},
    {"detectors", {"efficiency", "jitter_fwhm_ps", "dark_rate", "dead_time_ps"}},
    {"D1", {"efficiency", "jitter_fwhm_ps", "dark_rate", "dead_time_ps"}},
    {"D2", {"efficiency", "jitter_fwhm_ps", "dark_rate", "dead_time_ps"}},
    {"D3", {"efficiency", "jitter_fwhm_ps", "dark_rate", "dead_time_ps"}},
    {"D4", {"efficiency", "jitter_fwhm_ps", "dark_rate", "dead_time_ps"}},
    {"windows", {"width_ps", "t0_ps", "t1_ps", "x_center_ps", "y_center_ps"}},
    {"analysis", {"bin_width_ps", "span_ps", "origin_ps", "tags_file"}},
    {"theory", {"s", "n", "N", "g2_s", "g2_n", "eta3", "eta4", "nn_corr", "g2_ex", "chi"}},
};

class Section {
 public:
  Section(std::string name, pt::ptree const* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }
  bool has(std::string const& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

  std::optional<std::string> text(std::string const& key) const {
    if (!has(key)) return std::nullopt;
    return tree_->get<std::string>(key);
  }

  template <class T>
  std::optional<T> get(std::string const& key) const {
    auto const raw = text(key);
    if (!raw) return std::nullopt;
    std::string const s = trim(*raw);
    T value{};
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw ConfigError(name_ + "." + key + ": expected a number, got '" + s + "'");
    }
    return value;
  }

  template <class T>
  void read(std::string const& key, T& target) const {
    if (auto v = get<T>(key)) target = *v;
  }

  void read_bool(std::string const& key, bool& target) const {
    auto const raw = text(key);
    if (!raw) return;
    std::string const s = trim(*raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
      target = true;
    } else if (s == "false" || s == "0" || s == "no" || s == "off") {
      target = false;
    } else {
      throw ConfigError(name_ + "." + key + ": expected true or false, got '" + s + "'");
    }
  }

 private:
  static std::string trim(std::string const& s) {
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::string name_;
  pt::ptree const* tree_;
};

void check_schema(pt::ptree const& root) {
  for (auto const& [section, body] : root) {
    auto const it = kSchema.find(section);
    if (it == kSchema.end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (auto const& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError("unknown key " + section + "." + key);
    }
  }
}

void read_detector(Section const& s, DetectorParams& d) {
  s.read("efficiency", d.efficiency);
  s.read("jitter_fwhm_ps", d.jitter_fwhm);
  s.read("dark_rate", d.dark_rate);
  s.read("dead_time_ps", d.dead_time);
}

// Re-throws a validation message with the section prefix when it lacks one.
template <class F>
void validate_in(std::string const& section, F&& f) {
  try {
    f();
  } catch (ConfigError const& e) {
    std::string const msg = e.what();
    if (msg.starts_with(section + ".")) throw;
    throw ConfigError("[" + section + "] " + msg);
  } catch (DomainError const& e) {
    throw ConfigError("[" + section + "] " + e.what());
  }
}

}  // namespace

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::cw: return "cw";
    case Tier::heralded_trials: return "heralded_trials";
    case Tier::parametric: return "parametric";
  }
  return "?";
}

RunConfig parse_config(std::string_view text, std::filesystem::path const& base_dir) {
  pt::ptree root;
  try {
    std::istringstream is{std::string(text)};
    pt::read_ini(is, root);
  } catch (pt::ini_parser_error const& e) {
    throw ConfigError("config syntax error at line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_schema(root);
  auto section = [&](std::string const& name) {
    auto const it = root.find(name);
    return Section(name, it == root.not_found() ? nullptr : &it->second);
  };

  RunConfig c;
  auto& p = c.pipeline;

  Section const run = section("run");
  if (auto seed = run.get<std::uint64_t>("seed")) c.seed = *seed;
  if (auto mode = run.text("source_mode")) {
    if (*mode == "cw") {
      c.tier = Tier::cw;
    } else if (*mode == "heralded_trials") {
      c.tier = Tier::heralded_trials;
    } else if (*mode == "parametric") {
      c.tier = Tier::parametric;
    } else {
      throw ConfigError("run.source_mode: expected cw, heralded_trials or parametric, got '" + *mode + "'");
    }
  }
  p.mode = c.tier == Tier::heralded_trials ? SourceMode::heralded_trials : SourceMode::cw;
  run.read("duration_s", p.duration_s);
  run.read("slice_length_ps", p.slice_length);
  run.read("trials", p.trials);
  run.read("single_trials", p.single_trials);
  run.read("frame_length_ps", p.frame_length);
  run.read("herald_to_d1", p.herald_to_d1);
  c.parametric.trials = p.trials;
  run.read("blocks", c.parametric.blocks);
  run.read("signal_overlap", c.parametric.signal_overlap);

  Section const src = section("source");
  auto& s = p.source;
  src.read("pair_rate", s.pair_rate);
  src.read("coherence_fwhm_ps", s.coherence_fwhm);
  src.read("s_mean", s.s_mean);
  src.read("g2_s", s.g2_s_target);
  src.read("n_mean", s.n_mean);
  src.read("g2_n", s.g2_n_target);
  src.read("N_mean", s.N_mean);
  src.read("herald_efficiency", s.herald_efficiency);
  src.read("window_width_ps", s.window_width);
  src.read("noise_modes", s.noise_modes);
  validate_in("source", [&] { s.validate(); });

  Section const circ = section("circuit");
  circ.read("path_delay_ps", p.circuit.path_delay);
  circ.read("split_ratio", p.circuit.split_ratio);
  circ.read("loss_long", p.circuit.loss_long);
  circ.read("loss_short", p.circuit.loss_short);
  circ.read("grouping_radius_ps", p.circuit.grouping_radius);
  circ.read_bool("sample_wavepacket", p.circuit.sample_wavepacket);
  p.circuit.validate();

  DetectorParams common;
  read_detector(section("detectors"), common);
  validate_in("detectors", [&] { common.validate(); });
  for (Channel ch : kAllChannels) {
    std::string const name(to_string(ch));
    DetectorParams d = common;
    read_detector(section(name), d);
    validate_in(name, [&] { d.validate(); });
    p.detectors[index_of(ch)] = d;
  }

  Section const win = section("windows");
  win.read("width_ps", p.window_width);
  // Default t0 puts L' on R.
  p.t0 = p.circuit.path_delay;
  win.read("t0_ps", p.t0);
  win.read("t1_ps", p.t1);
  bool const has_x = win.has("x_center_ps"), has_y = win.has("y_center_ps");
  if (has_x != has_y) throw ConfigError("windows: x_center_ps and y_center_ps must be given together");
  if (has_x) {
    WindowConfig w;
    w.width = p.window_width;
    w.x_center = *win.get<Picoseconds>("x_center_ps");
    w.y_center = *win.get<Picoseconds>("y_center_ps");
    w.t0 = p.t0;
    w.t1 = p.t1;
    validate_in("windows", [&] { w.validate(); });
    c.windows = w;
  }
  if (p.window_width <= 0) throw ConfigError("windows.width_ps must be > 0");
  if (p.t0 == p.t1) throw ConfigError("windows.t0_ps and windows.t1_ps must differ");

  Section const ana = section("analysis");
  ana.read("bin_width_ps", c.analysis.bin_width);
  ana.read("span_ps", c.analysis.span);
  ana.read("origin_ps", c.analysis.origin);
  if (auto f = ana.text("tags_file")) {
    std::filesystem::path path(*f);
    c.analysis.tags_file = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  }
  if (c.analysis.bin_width <= 0) throw ConfigError("analysis.bin_width_ps must be > 0");
  if (c.analysis.span <= 0) throw ConfigError("analysis.span_ps must be > 0");

  Section const th = section("theory");
  if (th.present()) {
    if (th.has("s") || th.has("n") || th.has("N")) {
      TheoryPoint pt;
      th.read("s", pt.s);
      th.read("n", pt.n);
      th.read("N", pt.N);
      th.read("g2_s", pt.g2_s);
      th.read("g2_n", pt.g2_n);
      th.read("eta3", pt.eta3);
      th.read("eta4", pt.eta4);
      th.read("nn_corr", pt.nn_corr);
      validate_in("theory", [&] { pt.validate(); });
      c.theory.point = pt;
    }
    c.theory.g2_ex = th.get<double>("g2_ex");
    c.theory.chi = th.get<double>("chi");
    if (c.theory.g2_ex.has_value() != c.theory.chi.has_value()) {
      throw ConfigError("theory: g2_ex and chi must be given together");
    }
    if (c.theory.chi && (*c.theory.chi < 0.0 || *c.theory.g2_ex < 0.0)) {
      throw ConfigError("theory: g2_ex and chi must be >= 0");
    }
  }

  c.parametric.source = p.source;
  if (c.seed) {
    p.seed = *c.seed;
    c.parametric.seed = *c.seed;
  }
  return c;
}

RunConfig load_config(std::filesystem::path const& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (std::exception const& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  return parse_config(text, path.parent_path());
}

void RunConfig::validate_for_simulation() const {
  if (!seed) throw ConfigError("run.seed is required for simulate");
  switch (tier) {
    case Tier::cw:
    case Tier::heralded_trials:
      pipeline.validate();
      break;
    case Tier::parametric:
      validate_in("run", [&] { parametric.validate(); });
      break;
  }
}

std::optional<double> simulated_duration(RunConfig const& config) {
  switch (config.tier) {
    case Tier::cw:
      return config.pipeline.duration_s;
    case Tier::heralded_trials: {
      auto const& p = config.pipeline;
      Picoseconds const frame = p.frame_length > 0 ? p.frame_length : default_frame_length(p);
      return static_cast<double>(2 * p.trials + p.single_trials) * static_cast<double>(frame) /
             kPsPerSecond;
    }
    case Tier::parametric:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace hom
