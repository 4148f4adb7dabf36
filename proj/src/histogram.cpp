#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "hom/histogram.hpp"
#include "hom/io.hpp"
#include "hom/simd/kernels.hpp"

namespace hom {

Histogram::Histogram(Picoseconds bin_width, Picoseconds origin, std::size_t n_bins)
    : bin_width_(bin_width), origin_(origin) {
  if (bin_width <= 0) throw ConfigError("histogram bin_width must be > 0");
  if (n_bins == 0) throw ConfigError("histogram n_bins must be > 0");
  counts_.assign(n_bins, 0);
}

Histogram::Histogram(Picoseconds bin_width, Picoseconds origin, std::vector<std::uint64_t> counts,
                     std::uint64_t out_of_range)
    : bin_width_(bin_width), origin_(origin), counts_(std::move(counts)),
      out_of_range_(out_of_range) {
  if (bin_width <= 0) throw ConfigError("histogram bin_width must be > 0");
  if (counts_.empty()) throw ConfigError("histogram n_bins must be > 0");
}

std::optional<std::size_t> Histogram::bin_of(Picoseconds t) const {
  Picoseconds const d = t - origin_;
  if (d < 0 || d >= span()) return std::nullopt;
  return static_cast<std::size_t>(d / bin_width_);
}

void Histogram::accumulate(Picoseconds t) {
  if (auto const b = bin_of(t)) {
    ++counts_[*b];
  } else {
    ++out_of_range_;
  }
}

void Histogram::accumulate_delays(std::span<Picoseconds const> stops, Picoseconds start) {
  out_of_range_ += simd::bin_delays(stops, start, {origin_, bin_width_, counts_.size()}, counts_);
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t Histogram::sum_between(double lo, double hi) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    double const c = bin_center(i);
    if (c >= lo && c < hi) s += counts_[i];
  }
  return s;
}

void Histogram::merge(Histogram const& other) {
  if (other.bin_width_ != bin_width_ || other.origin_ != origin_ ||
      other.counts_.size() != counts_.size()) {
    throw ConfigError("cannot merge histograms with different binning");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  out_of_range_ += other.out_of_range_;
}

void write_histogram_csv(std::ostream& os, Histogram const& h) {
  os << "bin_center_ps,counts\n";
  for (std::size_t i = 0; i < h.size(); ++i) {
    os << format_double(h.bin_center(i)) << ',' << h.count(i) << '\n';
  }
}

void write_histogram_csv(std::filesystem::path const& path, Histogram const& h) {
  std::ostringstream ss;
  write_histogram_csv(ss, h);
  write_file_atomic(path, ss.str());
}

Histogram read_histogram_csv(std::istream& is, std::optional<Picoseconds> bin_width) {
  std::string line;
  if (!std::getline(is, line) || line != "bin_center_ps,counts") {
    throw ConfigError("histogram CSV: missing header 'bin_center_ps,counts'");
  }
  std::vector<double> centers;
  std::vector<std::uint64_t> counts;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    auto const comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("histogram CSV row " + std::to_string(row) + ": expected two fields");
    }
    double c = 0;
    std::uint64_t n = 0;
    auto const* b = line.data();
    auto const r1 = std::from_chars(b, b + comma, c);
    auto const r2 = std::from_chars(b + comma + 1, b + line.size(), n);
    if (r1.ec != std::errc{} || r1.ptr != b + comma || r2.ec != std::errc{} ||
        r2.ptr != b + line.size()) {
      throw ConfigError("histogram CSV row " + std::to_string(row) + ": malformed '" + line + "'");
    }
    centers.push_back(c);
    counts.push_back(n);
  }
  if (centers.empty()) throw ConfigError("histogram CSV: no rows");

  double width = 0;
  if (centers.size() >= 2) {
    width = centers[1] - centers[0];
  } else if (bin_width) {
    width = static_cast<double>(*bin_width);
  } else {
    throw ConfigError("histogram CSV: single-bin file needs an explicit bin width");
  }
  if (width <= 0 || width != std::round(width)) {
    throw ConfigError("histogram CSV: bin centers are not on an integer-ps grid");
  }
  double const origin = centers[0] - width / 2;
  if (origin != std::round(origin)) {
    throw ConfigError("histogram CSV: bin edges are not integer picoseconds");
  }
  Histogram h(static_cast<Picoseconds>(width), static_cast<Picoseconds>(origin), std::move(counts));
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (h.bin_center(i) != centers[i]) {
      throw ConfigError("histogram CSV: non-uniform bin centers at row " + std::to_string(i + 2));
    }
  }
  return h;
}

Histogram read_histogram_csv(std::filesystem::path const& path,
                             std::optional<Picoseconds> bin_width) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_histogram_csv(in, bin_width);
}

}  // namespace hom
