#pragma once
// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// The variant is chosen once at startup from CPUID; HOM_SIMD=scalar in the
// environment forces the reference path. Tests call both directly.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace hom::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
bool cpu_supports(Isa isa);
Isa active_isa();

//---------------------------------------------------------------------------//
// Delay binning
//---------------------------------------------------------------------------//

struct BinSpec {
  std::int64_t origin;
  std::int64_t bin_width;
  std::size_t n_bins;
};

// For each stop, bin (stop - start) into counts; returns how many fell
// outside [origin, origin + n_bins * bin_width). |stop - start| < 2^51.
using BinDelaysFn = std::uint64_t (*)(std::span<std::int64_t const> stops, std::int64_t start,
                                      BinSpec spec, std::span<std::uint64_t> counts);

std::uint64_t bin_delays_scalar(std::span<std::int64_t const> stops, std::int64_t start,
                                BinSpec spec, std::span<std::uint64_t> counts);
#if defined(HOM_BUILD_AVX2)
std::uint64_t bin_delays_avx2(std::span<std::int64_t const> stops, std::int64_t start,
                              BinSpec spec, std::span<std::uint64_t> counts);
#endif

//---------------------------------------------------------------------------//
// Gaussian + baseline least squares
//---------------------------------------------------------------------------//

// model(x) = baseline + amplitude * exp(-4 ln2 (x - center)^2 / fwhm^2)
struct GaussianParams {
  double amplitude;
  double center;
  double fwhm;
  double baseline;
};

// Accumulated Gauss-Newton system for the residual r = y - model(x) with
// per-sample weights w (empty = all ones): J^T W J, J^T W r and sum w r^2.
// jtj is the upper triangle in row-major order (10 entries) for parameter
// order (amplitude, center, fwhm, baseline).
struct NormalEquations {
  std::array<double, 10> jtj{};
  std::array<double, 4> jtr{};
  double sse = 0.0;
};

using GaussianNormalFn = NormalEquations (*)(std::span<double const> x,
                                             std::span<double const> y,
                                             std::span<double const> w,
                                             GaussianParams const& p);

NormalEquations gaussian_normal_scalar(std::span<double const> x, std::span<double const> y,
                                       std::span<double const> w, GaussianParams const& p);
#if defined(HOM_BUILD_AVX2)
NormalEquations gaussian_normal_avx2(std::span<double const> x, std::span<double const> y,
                                     std::span<double const> w, GaussianParams const& p);
#endif

// Dispatched entry points.
std::uint64_t bin_delays(std::span<std::int64_t const> stops, std::int64_t start, BinSpec spec,
                         std::span<std::uint64_t> counts);
NormalEquations gaussian_normal(std::span<double const> x, std::span<double const> y,
                                std::span<double const> w, GaussianParams const& p);

}  // namespace hom::simd
