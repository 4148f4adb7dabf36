#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hom/fitting.hpp"

namespace hom {
namespace {

double gauss(double x, double amp, double center, double fwhm, double base) {
  double const d = (x - center) / fwhm;
  return base + amp * std::exp(-4.0 * std::numbers::ln2 * d * d);
}

TEST(FitGaussian, NoiselessRoundTrip) {
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(-1000.0 + 10.0 * i);
    y.push_back(gauss(x.back(), 500.0, 37.5, 231.0, 12.0));
  }
  auto const fit = fit_gaussian(x, y);
  EXPECT_NEAR(fit.amplitude, 500.0, 500.0 * 1e-6);
  EXPECT_NEAR(fit.center, 37.5, 231.0 * 1e-6);
  EXPECT_NEAR(fit.fwhm, 231.0, 231.0 * 1e-6);
  EXPECT_NEAR(fit.baseline, 12.0, 12.0 * 1e-6);
  EXPECT_LT(fit.residual_rms, 1e-6);
}

Histogram poisson_gaussian(std::mt19937_64& rng, double total, double center, double fwhm,
                           Picoseconds bin_width = 10, Picoseconds origin = -1000,
                           std::size_t bins = 200) {
  Histogram h(bin_width, origin, bins);
  double const sigma = fwhm / kFwhmPerSigma;
  double const per_bin = total * static_cast<double>(bin_width) / (sigma * std::sqrt(2 * std::numbers::pi));
  std::vector<std::uint64_t> counts(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    double const mean = gauss(h.bin_center(i), per_bin, center, fwhm, 0.0);
    counts[i] = mean > 0 ? std::poisson_distribution<std::uint64_t>(mean)(rng) : 0;
  }
  return Histogram(bin_width, origin, std::move(counts));
}

TEST(FitGaussian, PoissonNoisedWidth) {
  std::mt19937_64 rng(42);
  int within = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto const fit = fit_gaussian(poisson_gaussian(rng, 1e4, 0.0, 231.0));
    within += std::abs(fit.fwhm - 231.0) < 0.02 * 231.0;
  }
  EXPECT_GE(within, 95);
}

TEST(FitGaussian, FlatHistogramFails) {
  Histogram flat(10, 0, std::vector<std::uint64_t>(100, 50));
  EXPECT_THROW(fit_gaussian(flat), FitError);
  Histogram empty(10, 0, 100);
  EXPECT_THROW(fit_gaussian(empty), FitError);
}

TEST(FitGaussian, TooFewNonzeroSamples) {
  std::vector<std::uint64_t> counts(50, 0);
  counts[20] = 5;
  counts[21] = 9;
  counts[22] = 4;
  EXPECT_THROW(fit_gaussian(Histogram(10, 0, counts)), FitError);
}

TEST(FitGaussian, ShiftByWholeBinsMovesOnlyTheCenter) {
  std::mt19937_64 rng(7);
  auto const base = poisson_gaussian(rng, 1e4, 20.0, 231.0);
  auto const fit0 = fit_gaussian(base);
  for (int k : {-7, 3, 25}) {
    Histogram const moved(base.bin_width(), base.origin() + k * base.bin_width(),
                          std::vector<std::uint64_t>(base.counts().begin(), base.counts().end()));
    auto const fit = fit_gaussian(moved);
    EXPECT_NEAR(fit.center - fit0.center, k * 10.0, 1e-6);
    EXPECT_NEAR(fit.fwhm, fit0.fwhm, 1e-6 * fit0.fwhm);
    EXPECT_NEAR(fit.amplitude, fit0.amplitude, 1e-6 * fit0.amplitude);
    EXPECT_NEAR(fit.baseline, fit0.baseline, 1e-6 * std::max(1.0, fit0.baseline));
  }
}

TEST(FitGaussian, RangeRestrictedFitPicksOnePeak) {
  Histogram h(10, 0, 1000);
  std::vector<std::uint64_t> counts(1000);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double const x = h.bin_center(i);
    counts[i] = static_cast<std::uint64_t>(std::llround(gauss(x, 300, 2600, 200, 5) +
                                                        gauss(x, 500, 4000, 250, 0)));
  }
  Histogram const two(10, 0, counts);
  auto const fit = fit_gaussian(two, 3300, 4700);
  EXPECT_NEAR(fit.center, 4000.0, 2.0);
  EXPECT_NEAR(fit.fwhm, 250.0, 5.0);
}

TEST(Deconvolve, Examples) {
  double const measured = std::sqrt(231.0 * 231.0 + 85.0 * 85.0 * 2);
  EXPECT_NEAR(measured, 260.4, 0.1);
  std::vector<double> const jit{85.0, 85.0};
  EXPECT_NEAR(deconvolve_fwhm(measured, jit), 231.0, 1e-9);
  EXPECT_DOUBLE_EQ(deconvolve_fwhm(123.0, {}), 123.0);
  std::vector<double> const same{100.0};
  EXPECT_DOUBLE_EQ(deconvolve_fwhm(100.0, same), 0.0);
  EXPECT_THROW(deconvolve_fwhm(80.0, same), DomainError);
}

TEST(Deconvolve, RoundTripsQuadratureSums) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1.0, 300.0);
  for (int i = 0; i < 100; ++i) {
    double const tau = u(rng), a = u(rng), b = u(rng);
    std::vector<double> const c{a, b};
    EXPECT_NEAR(deconvolve_fwhm(std::sqrt(tau * tau + a * a + b * b), c), tau, 1e-9 * tau + 1e-9);
  }
}

std::map<DetectorPair, double> all_pairs(std::map<Channel, double> const& j) {
  std::map<DetectorPair, double> out;
  for (auto a = j.begin(); a != j.end(); ++a) {
    for (auto b = std::next(a); b != j.end(); ++b) {
      out[{a->first, b->first}] = std::hypot(a->second, b->second);
    }
  }
  return out;
}

TEST(EstimateJitters, UniformPairs) {
  std::map<DetectorPair, double> pairs;
  for (auto [a, b] : {std::pair{Channel::D1, Channel::D2}, {Channel::D1, Channel::D3},
                      {Channel::D1, Channel::D4}, {Channel::D3, Channel::D4}}) {
    pairs[{a, b}] = 85.0 * std::sqrt(2.0);
  }
  for (auto const& [c, j] : estimate_jitters(pairs)) EXPECT_NEAR(j, 85.0, 1e-9) << to_string(c);
}

TEST(EstimateJitters, HeterogeneousRecovery) {
  std::map<Channel, double> const truth{
      {Channel::D1, 70.0}, {Channel::D2, 85.0}, {Channel::D3, 90.0}, {Channel::D4, 100.0}};
  auto const got = estimate_jitters(all_pairs(truth));
  for (auto const& [c, j] : truth) EXPECT_NEAR(got.at(c), j, 1e-6);
}

TEST(EstimateJitters, SinglePairSymmetricSplit) {
  std::map<DetectorPair, double> const one{{{Channel::D1, Channel::D3}, 120.0}};
  auto const got = estimate_jitters(one, JitterModel::equal);
  EXPECT_NEAR(got.at(Channel::D1), 120.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(got.at(Channel::D3), 120.0 / std::sqrt(2.0), 1e-12);
}

TEST(EstimateJitters, Underdetermined) {
  std::map<DetectorPair, double> const one{{{Channel::D1, Channel::D3}, 120.0}};
  EXPECT_THROW(estimate_jitters(one), AnalysisError);
  // A chain without an odd cycle leaves one degree of freedom.
  std::map<DetectorPair, double> const chain{{{Channel::D1, Channel::D3}, 120.0},
                                             {{Channel::D3, Channel::D4}, 120.0}};
  EXPECT_THROW(estimate_jitters(chain), AnalysisError);
  EXPECT_THROW(estimate_jitters({}), AnalysisError);
}

}  // namespace
}  // namespace hom
