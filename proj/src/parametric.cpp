#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hom/optics.hpp"
#include "hom/parametric.hpp"
#include "hom/rng.hpp"
#include "hom/theory.hpp"

namespace hom {
namespace {

// Cumulative output tables for inputs (a, b) with a, b <= 2.
class BeamsplitterTable {
 public:
  explicit BeamsplitterTable(double overlap) {
    for (int a = 0; a <= 2; ++a) {
      for (int b = 0; b <= 2; ++b) {
        auto& e = entries_[static_cast<std::size_t>(a * 3 + b)];
        double acc = 0.0;
        for (auto const& o : hbs_transform(a, b, overlap)) {
          acc += o.probability;
          e.push_back({o.n_out3, acc});
        }
        e.back().second = 2.0;  // guard against rounding in the last bin
      }
    }
  }

  // Photons leaving towards D3; the rest go to D4.
  int sample(int a, int b, Engine& rng) const {
    auto const& e = entries_[static_cast<std::size_t>(a * 3 + b)];
    if (e.size() == 1) return e.front().first;
    double const u = std::uniform_real_distribution<double>{}(rng);
    for (auto const& [n3, cdf] : e) {
      if (u < cdf) return n3;
    }
    return e.back().first;
  }

 private:
  std::array<std::vector<std::pair<int, double>>, 9> entries_;
};

struct Ports {
  int in1 = 0;
  int in2 = 0;
};

struct Output {
  int n3 = 0;
  int n4 = 0;
};

class Simulator {
 public:
  explicit Simulator(ParametricConfig const& c)
      : signal_(c.source.s_mean, c.source.g2_s_target),
        stray_(c.source.n_mean, c.source.g2_n_target),
        noise_(c.source.N_mean / c.source.noise_modes, 1.0),
        modes_(c.source.noise_modes),
        signal_bs_(c.signal_overlap),
        same_mode_bs_(1.0) {}

  // Window output for the signal-or-stray mode pair plus the noise modes.
  Output window(WindowPhotonSampler const& p1, WindowPhotonSampler const& p2, bool signal_pair, Engine& rng) const {
    int const a = p1(rng), b = p2(rng);
    auto const& bs = signal_pair ? signal_bs_ : same_mode_bs_;
    Output o;
    o.n3 = bs.sample(a, b, rng);
    o.n4 = a + b - o.n3;
    if (noise_.distribution().p0 < 1.0) {
      for (int l = 0; l < modes_; ++l) {
        int const x = noise_(rng), y = noise_(rng);
        int const n3 = same_mode_bs_.sample(x, y, rng);
        o.n3 += n3;
        o.n4 += x + y - n3;
      }
    }
    return o;
  }

  WindowPhotonSampler const& signal() const { return signal_; }
  WindowPhotonSampler const& stray() const { return stray_; }

 private:
  WindowPhotonSampler signal_;
  WindowPhotonSampler stray_;
  WindowPhotonSampler noise_;
  int modes_;
  BeamsplitterTable signal_bs_;
  BeamsplitterTable same_mode_bs_;
};

struct Sums {
  double p0 = 0, p_inf = 0, c34 = 0, s3 = 0, s4 = 0, on = 0, off = 0;
  std::uint64_t trials = 0;

  Sums& operator+=(Sums const& o) {
    p0 += o.p0;
    p_inf += o.p_inf;
    c34 += o.c34;
    s3 += o.s3;
    s4 += o.s4;
    on += o.on;
    off += o.off;
    trials += o.trials;
    return *this;
  }
  Sums operator-(Sums const& o) const {
    Sums r = *this;
    r.p0 -= o.p0;
    r.p_inf -= o.p_inf;
    r.c34 -= o.c34;
    r.s3 -= o.s3;
    r.s4 -= o.s4;
    r.on -= o.on;
    r.off -= o.off;
    r.trials -= o.trials;
    return r;
  }
};

struct Derived {
  double v, g, chi, residual;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Derived derive(Sums const& s) {
  Derived d{kNaN, kNaN, kNaN, kNaN};
  if (s.p_inf > 0) d.v = 1.0 - s.p0 / s.p_inf;
  double const t = static_cast<double>(s.trials);
  if (s.s3 > 0 && s.s4 > 0) d.g = s.c34 * t / (s.s3 * s.s4);
  if (s.on > 0 && 2.0 * s.on - s.off > 0) d.chi = s.off / (2.0 * s.on - s.off);
  if (std::isfinite(d.v) && std::isfinite(d.g) && std::isfinite(d.chi)) {
    d.residual = d.v - visibility_eq2(d.g, d.chi);
  }
  return d;
}

Sums run_block(Simulator const& sim, std::uint64_t trials, Engine& rng) {
  auto const& sig = sim.signal();
  auto const& str = sim.stray();
  Sums s;
  s.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    {  // zero delay
      Output const x = sim.window(sig, sig, true, rng);
      Output const y = sim.window(str, str, false, rng);
      s.p0 += static_cast<double>((x.n3 + y.n3) * (x.n4 + y.n4));
    }
    {  // long delay: signal meets stray in both windows
      Output const x = sim.window(sig, str, false, rng);
      Output const y = sim.window(str, sig, false, rng);
      s.p_inf += static_cast<double>((x.n3 + y.n3) * (x.n4 + y.n4));
    }
    {  // D1 only
      Output const x = sim.window(sig, str, false, rng);
      Output const y = sim.window(str, str, false, rng);
      s.c34 += static_cast<double>(x.n3 * x.n4);
      s.s3 += x.n3;
      s.s4 += x.n4;
      s.on += x.n3 + x.n4;
      s.off += y.n3 + y.n4;
    }
  }
  return s;
}

Estimate jackknife(std::vector<Derived> const& loo, double full, double Derived::*field) {
  double mean = 0.0;
  std::size_t n = 0;
  for (auto const& d : loo) {
    if (!std::isfinite(d.*field)) return {full, kNaN};
    mean += d.*field;
    ++n;
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (auto const& d : loo) var += (d.*field - mean) * (d.*field - mean);
  var *= static_cast<double>(n - 1) / static_cast<double>(n);
  return {full, std::sqrt(var)};
}

}  // namespace

void ParametricConfig::validate() const {
  source.validate();
  if (trials == 0) throw ConfigError("parametric.trials must be > 0");
  if (blocks < 2) throw ConfigError("parametric.blocks must be >= 2");
  if (trials < static_cast<std::uint64_t>(blocks)) {
    throw ConfigError("parametric.trials must be >= parametric.blocks");
  }
  if (!(signal_overlap >= 0.0 && signal_overlap <= 1.0)) {
    throw ConfigError("parametric.signal_overlap must be in [0, 1]");
  }
}

ParametricResult run_parametric(ParametricConfig const& config) {
  config.validate();
  Simulator const sim(config);
  auto const nb = static_cast<std::uint64_t>(config.blocks);
  std::vector<Sums> blocks(nb);
  for (std::uint64_t b = 0; b < nb; ++b) {
    auto rng = make_engine(config.seed, Stream::parametric, b);
    std::uint64_t const n = config.trials / nb + (b < config.trials % nb ? 1 : 0);
    blocks[b] = run_block(sim, n, rng);
  }
  Sums total;
  for (auto const& b : blocks) total += b;
  std::vector<Derived> loo;
  loo.reserve(nb);
  for (auto const& b : blocks) loo.push_back(derive(total - b));
  Derived const full = derive(total);

  ParametricResult r;
  r.trials = total.trials;
  r.visibility = jackknife(loo, full.v, &Derived::v);
  r.g2_ex = jackknife(loo, full.g, &Derived::g);
  r.chi = jackknife(loo, full.chi, &Derived::chi);
  r.eq2_residual = jackknife(loo, full.residual, &Derived::residual);
  double const t = static_cast<double>(total.trials);
  r.p0 = total.p0 / t;
  r.p_inf = total.p_inf / t;
  r.c34 = total.c34 / t;
  r.s3 = total.s3 / t;
  r.s4 = total.s4 / t;
  r.on = total.on / t;
  r.off = total.off / t;
  return r;
}

TagStream parametric_d1_frames(ParametricConfig const& config, WindowConfig const& windows,
                               Picoseconds frame_length) {
  config.validate();
  windows.validate();
  Picoseconds const reach = std::max(std::abs(windows.x_center), std::abs(windows.y_center));
  if (frame_length <= 2 * (reach + windows.width)) {
    throw ConfigError("parametric frame_length too short for the analysis windows");
  }
  Simulator const sim(config);
  auto rng = make_engine(config.seed, Stream::trials);
  std::array<std::vector<Picoseconds>, kNumChannels> ch;
  auto add = [&](Channel c, Picoseconds t, int count) {
    for (int k = 0; k < count; ++k) ch[index_of(c)].push_back(t);
  };
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    Picoseconds const t = reach + windows.width + static_cast<Picoseconds>(i) * frame_length;
    Output const x = sim.window(sim.signal(), sim.stray(), false, rng);
    Output const y = sim.window(sim.stray(), sim.stray(), false, rng);
    add(Channel::D1, t, 1);
    add(Channel::D3, t + windows.x_center, x.n3);
    add(Channel::D4, t + windows.x_center, x.n4);
    add(Channel::D3, t + windows.y_center, y.n3);
    add(Channel::D4, t + windows.y_center, y.n4);
  }
  for (auto& v : ch) std::sort(v.begin(), v.end());
  return TagStream(std::move(ch));
}

}  // namespace hom
