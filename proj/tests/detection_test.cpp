#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "hom/analysis.hpp"
#include "hom/detection.hpp"
#include "hom/fitting.hpp"

namespace hom {
namespace {

std::vector<Picoseconds> comb(std::size_t n, Picoseconds spacing, Picoseconds first = 1000) {
  std::vector<Picoseconds> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = first + static_cast<Picoseconds>(i) * spacing;
  return out;
}

TEST(Detect, IdealDetectorIsExact) {
  DetectorParams ideal{1.0, 0.0, 0.0, 0};
  auto const arrivals = comb(1000, 12345);
  EXPECT_EQ(detect(arrivals, ideal, 1.0, 7), arrivals);
}

TEST(Detect, EfficiencyThinning) {
  DetectorParams p{0.3, 0.0, 0.0, 0};
  auto const arrivals = comb(100000, 1000);
  auto const tags = detect(arrivals, p, 1.0, 11);
  double const sd = std::sqrt(100000 * 0.3 * 0.7);
  EXPECT_NEAR(static_cast<double>(tags.size()), 30000.0, 5 * sd);
  for (auto t : tags) EXPECT_TRUE(std::binary_search(arrivals.begin(), arrivals.end(), t));
}

TEST(Detect, ZeroEfficiencyGivesOnlyDarkCounts) {
  DetectorParams p{0.0, 85.0, 5000.0, 0};
  auto const arrivals = comb(10000, 1000);
  double total = 0, total_sq = 0;
  int const runs = 200;
  for (int seed = 0; seed < runs; ++seed) {
    auto const tags = detect(arrivals, p, 0.1, static_cast<std::uint64_t>(seed));
    for (auto t : tags) {
      EXPECT_GE(t, 0);
      EXPECT_LT(t, 100'000'000'000);
    }
    total += static_cast<double>(tags.size());
    total_sq += static_cast<double>(tags.size() * tags.size());
  }
  double const mean = total / runs;
  double const var = total_sq / runs - mean * mean;
  EXPECT_NEAR(mean, 500.0, 5 * std::sqrt(500.0 / runs));
  // Poisson: variance equals the mean.
  EXPECT_NEAR(var / mean, 1.0, 0.3);
}

TEST(Detect, TwoJitteredDetectorsCombineInQuadrature) {
  auto const arrivals = comb(200000, 100000);
  DetectorParams p{1.0, 85.0, 0.0, 0};
  std::array<std::vector<Picoseconds>, kNumChannels> ch;
  ch[index_of(Channel::D1)] = detect(arrivals, p, 1.0, 1);
  ch[index_of(Channel::D3)] = detect(arrivals, p, 1.0, 2);
  TagStream const tags(std::move(ch));
  auto const hist = delay_histogram(tags, Channel::D1, Channel::D3, 5, 1000, -500);
  auto const fit = fit_gaussian(hist);
  EXPECT_NEAR(fit.fwhm, 85.0 * std::sqrt(2.0), 0.02 * 85.0 * std::sqrt(2.0));
  EXPECT_NEAR(fit.center, 0.0, 2.0);
}

TEST(Detect, SortedOutputAndDeterminism) {
  DetectorParams p{0.8, 85.0, 1e5, 0};
  auto const arrivals = comb(5000, 200);
  auto const a = detect(arrivals, p, 0.001, 5);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(a, detect(arrivals, p, 0.001, 5));
  EXPECT_NE(a, detect(arrivals, p, 0.001, 6));
}

TEST(DeadTime, DropsTagsInsideTheDeadInterval) {
  std::vector<Picoseconds> const tags{0, 10, 49, 50, 51, 120, 150, 171};
  EXPECT_EQ(apply_dead_time(tags, 50), (std::vector<Picoseconds>{0, 50, 120, 171}));
  EXPECT_EQ(apply_dead_time(tags, 0), tags);
  EXPECT_TRUE(apply_dead_time({}, 50).empty());
}

TEST(DeadTime, MinimumSpacingHolds) {
  DetectorParams p{1.0, 0.0, 1e9, 40000};
  auto const tags = detect(std::vector<Picoseconds>{}, p, 1e-5, 3);
  ASSERT_GT(tags.size(), 10u);
  for (std::size_t i = 1; i < tags.size(); ++i) EXPECT_GE(tags[i] - tags[i - 1], 40000);
}

TEST(DetectorParams, Validation) {
  EXPECT_THROW((DetectorParams{1.5, 0, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((DetectorParams{0.5, -1, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((DetectorParams{0.5, 0, -1, 0}.validate()), ConfigError);
  EXPECT_THROW((DetectorParams{0.5, 0, 0, -1}.validate()), ConfigError);
  EXPECT_NO_THROW((DetectorParams{0.5, 85, 100, 50000}.validate()));
}

}  // namespace
}  // namespace hom
