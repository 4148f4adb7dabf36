#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "hom/optics.hpp"

namespace hom {
namespace {

// |<psi1|psi2>|^2 by trapezoid quadrature of normalized Gaussian amplitudes.
double overlap_quadrature(double t1, double t2, double fwhm) {
  double const sigma = fwhm / kFwhmPerSigma;
  double const norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  auto psi = [&](double t, double c) { return norm * std::exp(-(t - c) * (t - c) / (4 * sigma * sigma)); };
  double const lo = std::min(t1, t2) - 12 * sigma, hi = std::max(t1, t2) + 12 * sigma;
  int const n = 20000;
  double const h = (hi - lo) / n;
  double sum = 0;
  for (int i = 0; i <= n; ++i) {
    double const t = lo + i * h;
    sum += (i == 0 || i == n ? 0.5 : 1.0) * psi(t, t1) * psi(t, t2);
  }
  return sum * h * sum * h;
}

TEST(TemporalOverlap, MatchesQuadrature) {
  EXPECT_NEAR(temporal_overlap(0, 231, 231), 0.25, 1e-9);
  for (double d : {0.0, 10.0, 80.0, 231.0, 500.0}) {
    for (double f : {50.0, 231.0, 400.0}) {
      EXPECT_NEAR(temporal_overlap(100.0, 100.0 + d, f), overlap_quadrature(100.0, 100.0 + d, f), 1e-9)
          << d << ", " << f;
    }
  }
  EXPECT_DOUBLE_EQ(temporal_overlap(5, 5, 231), 1.0);
  EXPECT_THROW(temporal_overlap(0, 1, 0), ConfigError);
}

TEST(TemporalOverlap, GroupingRadiusAtOneInAMillion) {
  double const r = default_grouping_radius(231);
  EXPECT_NEAR(temporal_overlap(0, r, 231), 1e-6, 1e-15);
}

// Independent oracle: four modes (port 1/2 x parallel/orthogonal), truncated
// at 4 photons each, beamsplitter unitary exp(pi/4 (a1^dag a2 - a2^dag a1))
// applied to both the parallel and orthogonal pairs.
class FockOracle {
 public:
  static constexpr int kCut = 5;
  static constexpr int kDim = kCut * kCut * kCut * kCut;

  FockOracle() {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(kDim, kDim);
    g += hop(0, 2) - hop(2, 0);
    g += hop(1, 3) - hop(3, 1);
    unitary_ = (std::numbers::pi / 4 * g).exp();
  }

  // Photon-number distribution at output port 3 (modes 0 and 1).
  std::map<int, double> outcome(int n1, int n2, double v) const {
    Eigen::VectorXd state = Eigen::VectorXd::Zero(kDim);
    state(index({n1, 0, 0, 0})) = 1.0;
    Eigen::MatrixXd const b_dag = std::sqrt(v) * create(2) + std::sqrt(1 - v) * create(3);
    for (int k = 0; k < n2; ++k) state = b_dag * state;
    state /= state.norm();
    Eigen::VectorXd const out = unitary_ * state;
    std::map<int, double> p;
    for (int i = 0; i < kDim; ++i) {
      auto const n = occupation(i);
      double const w = out(i) * out(i);
      if (w > 1e-15) p[n[0] + n[1]] += w;
    }
    return p;
  }

 private:
  static int index(std::array<int, 4> n) { return ((n[0] * kCut + n[1]) * kCut + n[2]) * kCut + n[3]; }
  static std::array<int, 4> occupation(int i) {
    return {i / (kCut * kCut * kCut), (i / (kCut * kCut)) % kCut, (i / kCut) % kCut, i % kCut};
  }
  static Eigen::MatrixXd create(int mode) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kDim, kDim);
    for (int i = 0; i < kDim; ++i) {
      auto n = occupation(i);
      if (n[mode] + 1 >= kCut) continue;
      double const amp = std::sqrt(n[mode] + 1.0);
      ++n[mode];
      m(index(n), i) = amp;
    }
    return m;
  }
  // a_from^dag a_to
  static Eigen::MatrixXd hop(int from, int to) { return create(from) * create(to).transpose(); }

  Eigen::MatrixXd unitary_;
};

TEST(HbsTransform, MatchesFockOracle) {
  FockOracle const oracle;
  for (int n1 = 0; n1 <= 2; ++n1) {
    for (int n2 = 0; n2 <= 2; ++n2) {
      for (double v : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        auto const expected = oracle.outcome(n1, n2, v);
        std::map<int, double> got;
        for (auto const& o : hbs_transform(n1, n2, v)) {
          EXPECT_EQ(o.n_out3 + o.n_out4, n1 + n2);
          got[o.n_out3] = o.probability;
        }
        for (int k = 0; k <= n1 + n2; ++k) {
          double const e = expected.count(k) ? expected.at(k) : 0.0;
          double const g = got.count(k) ? got.at(k) : 0.0;
          EXPECT_NEAR(g, e, 1e-12) << "(" << n1 << "," << n2 << "," << v << ") k=" << k;
        }
      }
    }
  }
}

TEST(HbsTransform, DipLimits) {
  for (auto const& o : hbs_transform(1, 1, 1.0)) EXPECT_NE(o.n_out3, 1);
  double split = -1;
  for (auto const& o : hbs_transform(1, 1, 0.0)) {
    if (o.n_out3 == 1) split = o.probability;
  }
  EXPECT_EQ(split, 0.5);
}

TEST(HbsTransform, TwoOneIdentical) {
  // |2,1> -> 3/8 |3,0>, 1/8 |2,1>, 1/8 |1,2>, 3/8 |0,3>
  std::map<int, double> p;
  for (auto const& o : hbs_transform(2, 1, 1.0)) p[o.n_out3] = o.probability;
  EXPECT_NEAR(p[3], 0.375, 1e-15);
  EXPECT_NEAR(p[2], 0.125, 1e-15);
  EXPECT_NEAR(p[1], 0.125, 1e-15);
  EXPECT_NEAR(p[0], 0.375, 1e-15);
}

TEST(HbsTransform, UnitarityAndMonotoneDip) {
  double last = 1.0;
  for (int i = 0; i <= 100; ++i) {
    double const v = i / 100.0;
    for (int n1 = 0; n1 <= 2; ++n1) {
      for (int n2 = 0; n2 <= 2; ++n2) {
        double sum = 0;
        for (auto const& o : hbs_transform(n1, n2, v)) {
          EXPECT_GT(o.probability, 0.0);
          sum += o.probability;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
    }
    double split = 0;
    for (auto const& o : hbs_transform(1, 1, v)) {
      if (o.n_out3 == 1) split = o.probability;
    }
    EXPECT_NEAR(split, (1 - v) / 2, 1e-12);
    EXPECT_LE(split, last);
    last = split;
  }
}

TEST(HbsTransform, OrderedByPort3) {
  auto const out = hbs_transform(2, 2, 0.3);
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_GT(out[i - 1].n_out3, out[i].n_out3);
}

TEST(HbsTransform, RejectsOutOfScopeInputs) {
  EXPECT_THROW(hbs_transform(3, 0, 1.0), ConfigError);
  EXPECT_THROW(hbs_transform(0, -1, 1.0), ConfigError);
  EXPECT_THROW(hbs_transform(1, 1, 1.5), ConfigError);
  EXPECT_THROW(hbs_transform(1, 1, -0.1), ConfigError);
}

PhotonRecord signal_at(Picoseconds t, int mode = 0) {
  return {t, Arm::signal_1541, t, 231.0, mode == 0 ? Origin::pair_signal : Origin::stray, mode};
}

TEST(RouteCircuit, SinglePhotonArrivals) {
  CircuitParams p;
  p.path_delay = 2600;
  p.sample_wavepacket = false;
  std::vector<PhotonRecord> const one{signal_at(0)};
  int long_count = 0, d3 = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto const out = route_circuit(one, p, seed);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].arrival == 0 || out[0].arrival == 2600);
    EXPECT_EQ(out[0].long_path, out[0].arrival == 2600);
    long_count += out[0].long_path;
    d3 += out[0].port == Channel::D3;
  }
  EXPECT_NEAR(long_count, 1000, 5 * std::sqrt(500.0));
  EXPECT_NEAR(d3, 1000, 5 * std::sqrt(500.0));
}

TEST(RouteCircuit, LossDropsPhotons) {
  CircuitParams p;
  p.loss_long = 0.0;
  p.sample_wavepacket = false;
  std::vector<PhotonRecord> recs;
  for (int i = 0; i < 1000; ++i) recs.push_back(signal_at(i * 100000));
  auto const out = route_circuit(recs, p, 3);
  for (auto const& r : out) EXPECT_FALSE(r.long_path);
  EXPECT_NEAR(static_cast<double>(out.size()), 500.0, 5 * std::sqrt(250.0));
}

// Photon A on the long path and B on the short path meet at the beamsplitter.
struct MeetingStats {
  int meetings = 0;
  int split = 0;
};

MeetingStats meet(int mode_b, bool sample_wavepacket) {
  CircuitParams p;
  p.path_delay = 4000;
  p.sample_wavepacket = sample_wavepacket;
  std::vector<PhotonRecord> const recs{signal_at(10000), signal_at(14000, mode_b)};
  MeetingStats s;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    auto const out = route_circuit(recs, p, seed);
    if (out.size() != 2) continue;
    bool const a_long = out[0].photon.emission_time == 10000 ? out[0].long_path : out[1].long_path;
    bool const b_long = out[0].photon.emission_time == 14000 ? out[0].long_path : out[1].long_path;
    if (!a_long || b_long) continue;
    ++s.meetings;
    s.split += out[0].port != out[1].port;
  }
  return s;
}

TEST(RouteCircuit, IdenticalPhotonsBunch) {
  for (bool sampled : {false, true}) {
    auto const s = meet(0, sampled);
    EXPECT_GT(s.meetings, 800);
    EXPECT_EQ(s.split, 0) << "sampled=" << sampled;
  }
}

TEST(RouteCircuit, OrthogonalModesDoNotInterfere) {
  auto const s = meet(2, true);
  EXPECT_NEAR(s.split, s.meetings / 2.0, 5 * std::sqrt(s.meetings / 4.0));
}

TEST(RouteCircuit, OutputSortedAndDeterministic) {
  CircuitParams p;
  std::vector<PhotonRecord> recs;
  for (int i = 0; i < 500; ++i) recs.push_back(signal_at(i * 1500));
  auto const a = route_circuit(recs, p, 17);
  auto const b = route_circuit(recs, p, 17);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].arrival, b[i].arrival);
    EXPECT_EQ(a[i].port, b[i].port);
    if (i > 0) {
      EXPECT_LE(a[i - 1].arrival, a[i].arrival);
    }
  }
}

TEST(SplitHeralds, Ratio) {
  std::vector<PhotonRecord> heralds(20000, PhotonRecord{});
  Engine rng(4);
  auto const out = split_heralds(heralds, 0.5, rng);
  EXPECT_EQ(out.d1.size() + out.d2.size(), heralds.size());
  EXPECT_NEAR(static_cast<double>(out.d1.size()), 10000.0, 5 * std::sqrt(5000.0));
}

}  // namespace
}  // namespace hom
