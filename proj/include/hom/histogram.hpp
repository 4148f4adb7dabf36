#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hom/core.hpp"

namespace hom {

// Fixed-width binned counts over [origin, origin + n_bins * bin_width).
// Events outside the span are tallied in out_of_range, never rejected.
class Histogram {
 public:
  Histogram(Picoseconds bin_width, Picoseconds origin, std::size_t n_bins);
  Histogram(Picoseconds bin_width, Picoseconds origin, std::vector<std::uint64_t> counts,
            std::uint64_t out_of_range = 0);

  void accumulate(Picoseconds t);
  // Adds delays (stop - start) for a run of stop times; uses the SIMD kernel.
  void accumulate_delays(std::span<Picoseconds const> stops, Picoseconds start);

  Picoseconds bin_width() const { return bin_width_; }
  Picoseconds origin() const { return origin_; }
  std::size_t size() const { return counts_.size(); }
  Picoseconds span() const { return bin_width_ * static_cast<Picoseconds>(counts_.size()); }
  std::span<std::uint64_t const> counts() const { return counts_; }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }
  std::uint64_t out_of_range() const { return out_of_range_; }
  std::uint64_t total() const;

  double bin_center(std::size_t i) const {
    return static_cast<double>(origin_) +
           (static_cast<double>(i) + 0.5) * static_cast<double>(bin_width_);
  }
  // Index of the bin holding t, or nullopt if outside.
  std::optional<std::size_t> bin_of(Picoseconds t) const;

  // Sum of counts in bins whose centers fall in [lo, hi).
  std::uint64_t sum_between(double lo, double hi) const;

  void merge(Histogram const& other);

  friend bool operator==(Histogram const&, Histogram const&) = default;

 private:
  Picoseconds bin_width_;
  Picoseconds origin_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t out_of_range_ = 0;
};

// CSV: header `bin_center_ps,counts`, one row per bin, LF endings.
void write_histogram_csv(std::ostream& os, Histogram const& h);
void write_histogram_csv(std::filesystem::path const& path, Histogram const& h);
// Bin width is recovered from consecutive centers; a single-bin file needs
// the width supplied. The out-of-range tally is not part of the format.
Histogram read_histogram_csv(std::istream& is, std::optional<Picoseconds> bin_width = {});
Histogram read_histogram_csv(std::filesystem::path const& path,
                             std::optional<Picoseconds> bin_width = {});

}  // namespace hom
