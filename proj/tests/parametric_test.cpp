#include <cmath>

#include <gtest/gtest.h>

#include "hom/parametric.hpp"
#include "hom/theory.hpp"

namespace hom {
namespace {

// Exact per-trial means from beamsplitter moments. For two independent inputs
// with means (ma, mb), factorial moments (Ga, Gb) and squared overlap v, a
// 50:50 splitter gives <n3 n4> = (Ga + Gb)/4 + ma mb (1 - v)/2 and
// <n3> = <n4> = (ma + mb)/2. Independent mode pairs add their covariances.
struct Input {
  double mean;
  double g2;
  double factorial() const { return mean * mean * g2; }
};

double pair_covariance(Input a, Input b, double v) {
  return (a.factorial() + b.factorial()) / 4 + a.mean * b.mean * (1 - v) / 2 -
         (a.mean + b.mean) * (a.mean + b.mean) / 4;
}

struct Exact {
  double p0, p_inf, c34, s3, on, off;
};

Exact exact(ParametricConfig const& c) {
  Input const s{c.source.s_mean, c.source.g2_s_target};
  Input const n{c.source.n_mean, c.source.g2_n_target};
  int const modes = c.source.noise_modes;
  Input const noise{c.source.N_mean / modes, 1.0};
  double const noise_cov = modes * pair_covariance(noise, noise, 1.0);
  double const window_mean = s.mean + n.mean + 2 * c.source.N_mean;
  double const both = 2 * (s.mean + n.mean + 2 * c.source.N_mean);
  Exact e;
  e.p0 = pair_covariance(s, s, c.signal_overlap) + pair_covariance(n, n, 1.0) + 2 * noise_cov +
         both * both / 4;
  e.p_inf = 2 * pair_covariance(s, n, 1.0) + 2 * noise_cov + both * both / 4;
  e.c34 = pair_covariance(s, n, 1.0) + noise_cov + window_mean * window_mean / 4;
  e.s3 = window_mean / 2;
  e.on = window_mean;
  e.off = 2 * n.mean + 2 * c.source.N_mean;
  return e;
}

ParametricConfig point(double s, double g_s, double n, double g_n, double N, std::uint64_t trials) {
  ParametricConfig c;
  c.source.s_mean = s;
  c.source.g2_s_target = g_s;
  c.source.n_mean = n;
  c.source.g2_n_target = g_n;
  c.source.N_mean = N;
  c.source.noise_modes = 3;
  c.trials = trials;
  return c;
}

TEST(ExactOracle, AgreesWithClosedFormAtZeroNoise) {
  auto const c = point(0.3, 0.2, 0.05, 1.0, 0.0, 1);
  auto const e = exact(c);
  auto const p = p0_p_inf_single_mode(0.3, 0.05, 0.2, 1.0);
  EXPECT_NEAR(e.p0, p.p0, 1e-15);
  EXPECT_NEAR(e.p_inf, p.p_inf, 1e-15);
}

TEST(RunParametric, PerTrialMeansMatchExactMoments) {
  for (double N : {0.0, 0.05}) {
    auto c = point(0.4, 0.1, 0.08, 1.2, N, 40000);
    auto const e = exact(c);
    constexpr int kSeeds = 12;
    std::array<std::vector<double>, 6> got;
    for (int k = 0; k < kSeeds; ++k) {
      c.seed = 100 + static_cast<std::uint64_t>(k);
      auto const r = run_parametric(c);
      for (auto [i, v] : {std::pair{0, r.p0}, {1, r.p_inf}, {2, r.c34}, {3, r.s3}, {4, r.on}, {5, r.off}}) {
        got[static_cast<std::size_t>(i)].push_back(v);
      }
      EXPECT_DOUBLE_EQ(r.s3 + r.s4, r.on);
    }
    std::array<double, 6> const want{e.p0, e.p_inf, e.c34, e.s3, e.on, e.off};
    for (std::size_t i = 0; i < want.size(); ++i) {
      double mean = 0, sq = 0;
      for (double v : got[i]) mean += v;
      mean /= kSeeds;
      for (double v : got[i]) sq += (v - mean) * (v - mean);
      double const se = std::sqrt(sq / (kSeeds - 1) / kSeeds);
      EXPECT_NEAR(mean, want[i], 4 * se + 1e-12) << "N=" << N << " quantity " << i;
    }
  }
}

TEST(RunParametric, VisibilityMatchesClosedForm) {
  auto c = point(0.5, 0.05, 0.015, 1.0, 0.0, 200000);
  c.seed = 3;
  auto const r = run_parametric(c);
  EXPECT_NEAR(r.visibility.value, visibility_eq1(0.5, 0.015, 0.05, 1.0), 3 * r.visibility.sigma);
  EXPECT_NEAR(r.eq2_residual.value, 0.0, 3 * r.eq2_residual.sigma);
  EXPECT_GT(r.visibility.sigma, 0.0);
}

TEST(RunParametric, DistinguishableSignalsShowNoDip) {
  auto c = point(0.5, 0.0, 0.0, 1.0, 0.0, 100000);
  c.signal_overlap = 0.0;
  c.seed = 4;
  auto const r = run_parametric(c);
  EXPECT_NEAR(r.visibility.value, 0.0, 3 * r.visibility.sigma);
}

TEST(RunParametric, StrayOnlyG2ExIsTheStrayG2) {
  auto c = point(0.0, 0.0, 0.2, 1.5, 0.0, 200000);
  c.seed = 5;
  auto const r = run_parametric(c);
  EXPECT_NEAR(r.g2_ex.value, 1.5, 3 * r.g2_ex.sigma);
}

TEST(RunParametric, Deterministic) {
  auto c = point(0.3, 0.1, 0.03, 1.0, 0.02, 5000);
  c.seed = 9;
  auto const a = run_parametric(c);
  auto const b = run_parametric(c);
  EXPECT_EQ(a.p0, b.p0);
  EXPECT_EQ(a.visibility.value, b.visibility.value);
  EXPECT_EQ(a.visibility.sigma, b.visibility.sigma);
  c.seed = 10;
  auto const other = run_parametric(c);
  EXPECT_FALSE(other.p0 == a.p0 && other.p_inf == a.p_inf && other.c34 == a.c34 && other.on == a.on);
}

TEST(RunParametric, Validation) {
  auto c = point(0.3, 0.1, 0.03, 1.0, 0.0, 50);
  EXPECT_THROW(run_parametric(c), ConfigError);  // fewer trials than blocks
  c.trials = 1000;
  c.signal_overlap = 1.5;
  EXPECT_THROW(run_parametric(c), ConfigError);
  c.signal_overlap = 1.0;
  c.source.g2_s_target = 20.0;  // p1 < 0
  EXPECT_THROW(run_parametric(c), ConfigError);
}

TEST(ParametricFrames, Layout) {
  auto c = point(0.3, 0.1, 0.03, 1.0, 0.0, 1000);
  WindowConfig w{80, 4000, 2600, 4000, 2600};
  auto const tags = parametric_d1_frames(c, w, 10000);
  EXPECT_EQ(tags.size(Channel::D1), 1000u);
  EXPECT_EQ(tags.size(Channel::D2), 0u);
  auto const d1 = tags.channel(Channel::D1);
  for (std::size_t i = 1; i < d1.size(); ++i) EXPECT_EQ(d1[i] - d1[i - 1], 10000);
  EXPECT_THROW(parametric_d1_frames(c, w, 5000), ConfigError);
}

}  // namespace
}  // namespace hom
