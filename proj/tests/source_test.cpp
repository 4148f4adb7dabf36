#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "hom/rng.hpp"
#include "hom/source.hpp"

namespace hom {
namespace {

TEST(PhotonNumberDistribution, HandSolvedMoments) {
  auto const d = photon_number_distribution(0.1, 1.0);
  EXPECT_NEAR(d.p2, 0.005, 1e-15);
  EXPECT_NEAR(d.p1, 0.09, 1e-15);
  EXPECT_NEAR(d.p0, 0.905, 1e-15);
}

TEST(PhotonNumberDistribution, InfeasibleNamesProbability) {
  try {
    photon_number_distribution(1.5, 1.0);
    FAIL() << "expected ConfigError";
  } catch (ConfigError const& e) {
    EXPECT_NE(std::string(e.what()).find("p2"), std::string::npos) << e.what();
  }
  try {
    photon_number_distribution(0.5, 3.0);
    FAIL() << "expected ConfigError";
  } catch (ConfigError const& e) {
    EXPECT_NE(std::string(e.what()).find("p1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(photon_number_distribution(-0.1, 1.0), ConfigError);
}

TEST(WindowPhotonSampler, IdealSinglePhotonAndVacuum) {
  Engine rng(1);
  WindowPhotonSampler const one(1.0, 0.0), vacuum(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(one(rng), 1);
    EXPECT_EQ(vacuum(rng), 0);
  }
  EXPECT_EQ(sample_window_photons(1.0, 0.0, 99), 1);
  EXPECT_EQ(sample_window_photons(0.0, 1.0, 99), 0);
}

// Empirical mean and normalized second factorial moment with a delta-method
// standard error for the latter.
struct Moments {
  double mean, g2, g2_se;
};

Moments measure(double mean, double g2, int samples, std::uint64_t seed) {
  Engine rng(seed);
  WindowPhotonSampler const s(mean, g2);
  double sk = 0, sx = 0, skk = 0, sxx = 0, skx = 0;
  for (int i = 0; i < samples; ++i) {
    double const k = s(rng);
    double const x = k * (k - 1);
    sk += k;
    sx += x;
    skk += k * k;
    sxx += x * x;
    skx += k * x;
  }
  double const n = samples;
  double const m = sk / n, a = sx / n;
  double const vk = skk / n - m * m, vx = sxx / n - a * a, c = skx / n - m * a;
  double const var = (vx / std::pow(m, 4) + 4 * a * a * vk / std::pow(m, 6) - 4 * a * c / std::pow(m, 5)) / n;
  return {m, a / (m * m), std::sqrt(var)};
}

TEST(WindowPhotonSampler, MomentFidelity) {
  struct Case {
    double mean, g2;
  };
  std::uint64_t seed = 10;
  for (Case const c : {Case{0.1, 1.0}, Case{0.5, 0.05}, Case{0.3, 2.0}, Case{0.8, 0.5}}) {
    auto const m = measure(c.mean, c.g2, 1'000'000, seed++);
    double const mean_se = std::sqrt(c.mean * (1 + c.mean * c.g2 - c.mean) / 1e6);
    EXPECT_LT(std::abs(m.mean - c.mean), 5 * mean_se) << c.mean << ", " << c.g2;
    EXPECT_LT(std::abs(m.g2 - c.g2), 3 * m.g2_se) << c.mean << ", " << c.g2;
  }
}

TEST(SourceParams, Validation) {
  SourceParams p;
  EXPECT_NO_THROW(p.validate());
  p.pair_rate = -1;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.herald_efficiency = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.s_mean = 1.5;
  p.g2_s_target = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.noise_modes = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(PairStream, PoissonCount) {
  SourceParams p;
  p.pair_rate = 1e6;
  auto const pairs = generate_pair_stream(p, 1.0, 42);
  EXPECT_LT(std::abs(static_cast<double>(pairs.size()) - 1e6), 5 * 1e3);
}

TEST(PairStream, ZeroRateIsEmpty) {
  SourceParams p;
  EXPECT_TRUE(generate_pair_stream(p, 1.0, 1).empty());
}

TEST(PairStream, DeterministicAndLabelled) {
  SourceParams p;
  p.pair_rate = 1e5;
  p.coherence_fwhm = 231;
  auto const a = generate_pair_stream(p, 0.01, 7);
  auto const b = generate_pair_stream(p, 0.01, 7);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].herald, b[i].herald);
    EXPECT_EQ(a[i].signal, b[i].signal);
    EXPECT_EQ(a[i].herald.emission_time, a[i].signal.emission_time);
    EXPECT_EQ(a[i].herald.arm, Arm::herald_1580);
    EXPECT_EQ(a[i].signal.arm, Arm::signal_1541);
    EXPECT_EQ(a[i].signal.mode_fwhm, 231.0);
    if (i > 0) {
      EXPECT_LE(a[i - 1].signal.emission_time, a[i].signal.emission_time);
    }
  }
  auto const c = generate_pair_stream(p, 0.01, 8);
  EXPECT_FALSE(c.size() == a.size() && c.front().signal == a.front().signal);
  EXPECT_THROW(generate_pair_stream(p, 0.0, 1), ConfigError);
}

TEST(PairStream, HeraldThinning) {
  SourceParams p;
  p.pair_rate = 1e6;
  p.herald_efficiency = 0.3;
  auto const pairs = generate_pair_stream(p, 0.2, 5);
  auto const kept = std::count_if(pairs.begin(), pairs.end(), [](PhotonPair const& x) { return x.heralded; });
  double const n = static_cast<double>(pairs.size());
  EXPECT_LT(std::abs(static_cast<double>(kept) - 0.3 * n), 5 * std::sqrt(n * 0.3 * 0.7));
}

TEST(StationaryNoise, DisabledLeavesStreamUnchanged) {
  SourceParams p;
  p.pair_rate = 1e5;
  std::vector<PhotonRecord> signals;
  for (auto const& pair : generate_pair_stream(p, 0.01, 3)) signals.push_back(pair.signal);
  EXPECT_EQ(inject_stationary_noise(signals, p, 0.01, 4), signals);
}

TEST(StationaryNoise, RecordsAndRate) {
  SourceParams p;
  p.N_mean = 0.01;
  p.noise_modes = 3;
  double const duration = 0.01;
  auto const noise = inject_stationary_noise({}, p, duration, 11);
  double const expected = noise_photon_rate(p) * duration;
  EXPECT_DOUBLE_EQ(noise_photon_rate(p), 2 * 0.01 / 80e-12);
  EXPECT_LT(std::abs(static_cast<double>(noise.size()) - expected), 5 * std::sqrt(expected));
  for (std::size_t i = 0; i < noise.size(); ++i) {
    EXPECT_EQ(noise[i].origin, Origin::stray);
    EXPECT_GE(noise[i].mode_index, 1);
    EXPECT_LE(noise[i].mode_index, 3);
    EXPECT_GE(noise[i].emission_time, 0);
    if (i > 0) {
      EXPECT_LE(noise[i - 1].emission_time, noise[i].emission_time);
    }
  }
}

TEST(StationaryNoise, ChiSquareStationarity) {
  SourceParams p;
  p.N_mean = 0.002;
  double const duration = 0.01;
  auto const noise = inject_stationary_noise({}, p, duration, 21);
  constexpr int kIntervals = 40;
  std::vector<double> counts(kIntervals, 0.0);
  double const width = duration * kPsPerSecond / kIntervals;
  for (auto const& r : noise) counts[static_cast<std::size_t>(r.emission_time / width)] += 1;
  double const expected = static_cast<double>(noise.size()) / kIntervals;
  double chi2 = 0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  boost::math::chi_squared const dist(kIntervals - 1);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

}  // namespace
}  // namespace hom
