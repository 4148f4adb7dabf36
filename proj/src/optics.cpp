#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hom/optics.hpp"

namespace hom {
namespace {

constexpr double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Outcome probabilities P[p] (p photons to port 3) for |n1, n2> in a single
// common mode through the 50:50 beamsplitter.
std::vector<double> same_mode_transform(int n1, int n2) {
  int const total = n1 + n2;
  // a1^dag = (b3^dag + b4^dag)/sqrt2, a2^dag = (b3^dag - b4^dag)/sqrt2
  std::vector<double> coef(static_cast<std::size_t>(total) + 1, 0.0);
  for (int i = 0; i <= n1; ++i) {
    for (int j = 0; j <= n2; ++j) {
      double const sign = ((n2 - j) % 2 == 0) ? 1.0 : -1.0;
      coef[static_cast<std::size_t>(i + j)] += binomial(n1, i) * binomial(n2, j) * sign;
    }
  }
  std::vector<double> prob(coef.size());
  double const norm = factorial(n1) * factorial(n2) * std::pow(2.0, total);
  for (int p = 0; p <= total; ++p) {
    double const c = coef[static_cast<std::size_t>(p)];
    prob[static_cast<std::size_t>(p)] = c * c * factorial(p) * factorial(total - p) / norm;
  }
  return prob;
}

double sigma_of(double fwhm) { return fwhm / kFwhmPerSigma; }

// Wavepacket amplitude up to normalization.
double amplitude(double t, double center, double sigma) {
  double const d = t - center;
  return std::exp(-d * d / (4.0 * sigma * sigma));
}

struct Staged {
  PhotonRecord photon;
  double center = 0.0;  // wavepacket center at the recombining beamsplitter
  bool long_path = false;
};

}  // namespace

void CircuitParams::validate() const {
  if (path_delay < 0) throw ConfigError("circuit.path_delay must be >= 0");
  auto in_unit = [](double v, char const* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("circuit.") + name + " must be in [0, 1]");
  };
  in_unit(split_ratio, "split_ratio");
  in_unit(loss_long, "loss_long");
  in_unit(loss_short, "loss_short");
}

double temporal_overlap(double t1, double t2, double fwhm) {
  if (!(fwhm > 0.0)) throw ConfigError("temporal_overlap: fwhm must be > 0");
  double const d = (t1 - t2) / fwhm;
  return std::exp(-2.0 * std::numbers::ln2 * d * d);
}

double default_grouping_radius(double fwhm) {
  return fwhm * std::sqrt(std::log(1e6) / (2.0 * std::numbers::ln2));
}

std::vector<BSOutcome> hbs_transform(int n_in1, int n_in2, double overlap) {
  if (n_in1 < 0 || n_in2 < 0 || n_in1 > 2 || n_in2 > 2) {
    throw ConfigError("hbs_transform: inputs (" + std::to_string(n_in1) + ", " +
                      std::to_string(n_in2) + ") exceed the 2-photon-per-port truncation");
  }
  if (!(overlap >= 0.0 && overlap <= 1.0)) {
    throw ConfigError("hbs_transform: overlap must be in [0, 1]");
  }
  int const total = n_in1 + n_in2;
  std::vector<double> prob(static_cast<std::size_t>(total) + 1, 0.0);
  // Split port 2's photons into k parallel and n_in2 - k orthogonal ones.
  for (int k = 0; k <= n_in2; ++k) {
    double const w = binomial(n_in2, k) * std::pow(overlap, k) * std::pow(1.0 - overlap, n_in2 - k);
    if (w == 0.0) continue;
    auto const par = same_mode_transform(n_in1, k);
    int const m = n_in2 - k;
    for (std::size_t p = 0; p < par.size(); ++p) {
      for (int j = 0; j <= m; ++j) {
        prob[p + static_cast<std::size_t>(j)] += w * par[p] * binomial(m, j) * std::pow(0.5, m);
      }
    }
  }
  std::vector<BSOutcome> out;
  for (int p = total; p >= 0; --p) {
    double const pr = prob[static_cast<std::size_t>(p)];
    if (pr > 0.0) out.push_back({p, total - p, pr});
  }
  return out;
}

namespace {

class Router {
 public:
  Router(CircuitParams const& params, Engine& rng) : params_(params), rng_(rng) {}

  void route(std::span<Staged const> group, std::vector<RoutedPhoton>& out) {
    std::vector<Staged const*> port1, port2;
    for (auto const& s : group) (s.long_path ? port1 : port2).push_back(&s);
    if (port1.size() == 1 && port2.size() == 1) {
      route_pair(*port1[0], *port2[0], out);
    } else if (!port1.empty() && !port2.empty() && port1.size() <= 2 && port2.size() <= 2) {
      route_multi(port1, port2, out);
    } else {
      for (auto const& s : group) route_single(s, out);
    }
  }

  void route_single(Staged const& s, std::vector<RoutedPhoton>& out) {
    double const p3 = s.long_path ? params_.split_ratio : 1.0 - params_.split_ratio;
    Channel const port = unit_(rng_) < p3 ? Channel::D3 : Channel::D4;
    out.push_back({s.photon, port, arrival(s.center, s.photon.mode_fwhm), s.long_path});
  }

 private:
  double unit() { return unit_(rng_); }

  Picoseconds arrival(double center, double fwhm) {
    double t = center;
    if (params_.sample_wavepacket) t += std::normal_distribution<double>(0.0, sigma_of(fwhm))(rng_);
    return static_cast<Picoseconds>(std::llround(t));
  }

  BSOutcome pick(std::vector<BSOutcome> const& outcomes) {
    double u = unit();
    for (auto const& o : outcomes) {
      if (u < o.probability) return o;
      u -= o.probability;
    }
    return outcomes.back();
  }

  // One photon per input port: exact joint detection-time density.
  void route_pair(Staged const& a, Staged const& b, std::vector<RoutedPhoton>& out) {
    double const fwhm = 0.5 * (a.photon.mode_fwhm + b.photon.mode_fwhm);
    double const v = temporal_overlap(a.center, b.center, fwhm);
    BSOutcome const o = pick(hbs_transform(1, 1, v));
    bool const split = o.n_out3 == 1;

    double u = a.center, w = b.center;
    bool swapped = false;
    if (params_.sample_wavepacket) {
      double const sigma = sigma_of(fwhm);
      std::normal_distribution<double> jitter(0.0, sigma);
      // Propose from the symmetrized classical density, accept with
      // |X -/+ Y|^2 / (2 (X^2 + Y^2)); minus sign for the split outcome.
      while (true) {
        u = a.center + jitter(rng_);
        w = b.center + jitter(rng_);
        swapped = unit() < 0.5;
        if (swapped) std::swap(u, w);
        double const x = amplitude(u, a.center, sigma) * amplitude(w, b.center, sigma);
        double const y = amplitude(w, a.center, sigma) * amplitude(u, b.center, sigma);
        double const num = split ? (x - y) * (x - y) : (x + y) * (x + y);
        double const den = 2.0 * (x * x + y * y);
        if (den > 0.0 && unit() * den < num) break;
      }
    }
    Staged const& first = swapped ? b : a;
    Staged const& second = swapped ? a : b;
    Channel const p_first = o.n_out3 >= 1 ? Channel::D3 : Channel::D4;
    Channel const p_second = o.n_out3 == 2 ? Channel::D3 : Channel::D4;
    out.push_back({first.photon, p_first, static_cast<Picoseconds>(std::llround(u)), first.long_path});
    out.push_back({second.photon, p_second, static_cast<Picoseconds>(std::llround(w)), second.long_path});
  }

  void route_multi(std::vector<Staged const*> const& port1, std::vector<Staged const*> const& port2,
                   std::vector<RoutedPhoton>& out) {
    double v = 0.0;
    for (auto const* a : port1) {
      for (auto const* b : port2) {
        v += temporal_overlap(a->center, b->center, 0.5 * (a->photon.mode_fwhm + b->photon.mode_fwhm));
      }
    }
    v /= static_cast<double>(port1.size() * port2.size());
    BSOutcome const o = pick(hbs_transform(static_cast<int>(port1.size()),
                                           static_cast<int>(port2.size()), v));
    std::vector<Staged const*> all(port1);
    all.insert(all.end(), port2.begin(), port2.end());
    std::shuffle(all.begin(), all.end(), rng_);
    for (std::size_t i = 0; i < all.size(); ++i) {
      Channel const port = static_cast<int>(i) < o.n_out3 ? Channel::D3 : Channel::D4;
      out.push_back({all[i]->photon, port, arrival(all[i]->center, all[i]->photon.mode_fwhm),
                     all[i]->long_path});
    }
  }

  CircuitParams const& params_;
  Engine& rng_;
  std::uniform_real_distribution<double> unit_;
};

}  // namespace

std::vector<RoutedPhoton> route_circuit(std::span<PhotonRecord const> records,
                                        CircuitParams const& params, Engine& rng) {
  params.validate();
  std::vector<Staged> staged;
  staged.reserve(records.size());
  std::uniform_real_distribution<double> unit;
  for (auto const& r : records) {
    bool const long_path = unit(rng) < params.split_ratio;
    double const t = long_path ? params.loss_long : params.loss_short;
    if (t < 1.0 && !(unit(rng) < t)) continue;
    double const center =
        static_cast<double>(r.mode_center + (long_path ? params.path_delay : 0));
    staged.push_back({r, center, long_path});
  }
  std::stable_sort(staged.begin(), staged.end(),
                   [](Staged const& a, Staged const& b) { return a.center < b.center; });

  std::vector<RoutedPhoton> out;
  out.reserve(staged.size());
  Router router(params, rng);
  std::vector<Staged> cluster;
  std::vector<Staged> group;
  auto radius_of = [&](Staged const& s) {
    return params.grouping_radius > 0.0 ? params.grouping_radius
                                        : default_grouping_radius(s.photon.mode_fwhm);
  };
  auto flush = [&] {
    if (cluster.size() == 1) {
      router.route_single(cluster.front(), out);
    } else if (!cluster.empty()) {
      // Photons in different modes never interfere.
      std::stable_sort(cluster.begin(), cluster.end(), [](Staged const& a, Staged const& b) {
        return a.photon.mode_index < b.photon.mode_index;
      });
      for (std::size_t i = 0; i < cluster.size();) {
        std::size_t j = i;
        while (j < cluster.size() && cluster[j].photon.mode_index == cluster[i].photon.mode_index) ++j;
        router.route(std::span<Staged const>(cluster).subspan(i, j - i), out);
        i = j;
      }
    }
    cluster.clear();
  };
  for (auto const& s : staged) {
    if (!cluster.empty() && s.center - cluster.back().center > radius_of(s)) flush();
    cluster.push_back(s);
  }
  flush();

  std::stable_sort(out.begin(), out.end(),
                   [](RoutedPhoton const& a, RoutedPhoton const& b) { return a.arrival < b.arrival; });
  return out;
}

std::vector<RoutedPhoton> route_circuit(std::span<PhotonRecord const> records,
                                        CircuitParams const& params, std::uint64_t seed) {
  auto rng = make_engine(seed, Stream::circuit);
  return route_circuit(records, params, rng);
}

HeraldArrivals split_heralds(std::span<PhotonRecord const> heralds, double ratio_to_d1,
                             Engine& rng) {
  HeraldArrivals out;
  std::bernoulli_distribution to_d1(ratio_to_d1);
  for (auto const& h : heralds) (to_d1(rng) ? out.d1 : out.d2).push_back(h.emission_time);
  return out;
}

}  // namespace hom
