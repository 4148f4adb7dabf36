#include <cmath>
#include <numbers>

#include "hom/simd/kernels.hpp"

namespace hom::simd {

std::uint64_t bin_delays_scalar(std::span<std::int64_t const> stops, std::int64_t start,
                                BinSpec spec, std::span<std::uint64_t> counts) {
  std::int64_t const limit = spec.bin_width * static_cast<std::int64_t>(spec.n_bins);
  std::uint64_t out = 0;
  for (std::int64_t stop : stops) {
    std::int64_t const d = stop - start - spec.origin;
    if (d < 0 || d >= limit) {
      ++out;
      continue;
    }
    ++counts[static_cast<std::size_t>(d / spec.bin_width)];
  }
  return out;
}

NormalEquations gaussian_normal_scalar(std::span<double const> x, std::span<double const> y,
                                       std::span<double const> w, GaussianParams const& p) {
  constexpr double k4ln2 = 4.0 * std::numbers::ln2;
  double const inv_f2 = 1.0 / (p.fwhm * p.fwhm);
  NormalEquations ne;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double const dx = x[i] - p.center;
    double const e = std::exp(-k4ln2 * dx * dx * inv_f2);
    double const r = y[i] - (p.baseline + p.amplitude * e);
    double const ae = p.amplitude * e * 2.0 * k4ln2 * inv_f2;
    double const wi = w.empty() ? 1.0 : w[i];
    std::array<double, 4> const j{e, ae * dx, ae * dx * dx / p.fwhm, 1.0};
    std::size_t k = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      double const wj = wi * j[a];
      for (std::size_t b = a; b < 4; ++b) ne.jtj[k++] += wj * j[b];
      ne.jtr[a] += wj * r;
    }
    ne.sse += wi * r * r;
  }
  return ne;
}

}  // namespace hom::simd
