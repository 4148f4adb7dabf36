#pragma once
// Gaussian-plus-baseline least squares and quadrature deconvolution of
// timing widths.

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hom/core.hpp"
#include "hom/histogram.hpp"

namespace hom {

struct GaussianFit {
  double amplitude = 0.0;  // counts above baseline at the peak
  double center = 0.0;     // ps
  double fwhm = 0.0;       // ps
  double baseline = 0.0;   // counts
  double residual_rms = 0.0;
  int iterations = 0;
};

struct FitOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 200;  // per pass
  // Refits weighted by 1 / max(1, model) after the unweighted fit; 0 keeps
  // the plain unweighted result.
  int reweight_passes = 2;
  // FWHM bounds; defaults are a quarter of the sample spacing and four
  // times the sampled range.
  std::optional<double> fwhm_min;
  std::optional<double> fwhm_max;
};

// Levenberg-Marquardt on y = baseline + amplitude exp(-4 ln2 (x-center)^2 / fwhm^2),
// unweighted first, then reweighted by the Poisson variance of the fitted
// model. residual_rms is unweighted. Needs >= 5 nonzero samples. Throws FitError on degenerate input,
// non-convergence or a FWHM at its bounds.
GaussianFit fit_gaussian(std::span<double const> x, std::span<double const> y,
                         FitOptions const& options = {});
GaussianFit fit_gaussian(Histogram const& hist, FitOptions const& options = {});
// Fits only the bins whose centers lie in [lo, hi).
GaussianFit fit_gaussian(Histogram const& hist, double lo, double hi, FitOptions const& options = {});

// sqrt(measured^2 - sum c_i^2); DomainError when the radicand is negative.
double deconvolve_fwhm(double measured, std::span<double const> components);

using DetectorPair = std::pair<Channel, Channel>;

enum class JitterModel { least_squares, equal };

// Solves j_a^2 + j_b^2 = F_ab^2 over the given pairs. The equal model fits
// a single common jitter. Throws AnalysisError if underdetermined.
std::map<Channel, double> estimate_jitters(std::map<DetectorPair, double> const& pairwise_fwhm,
                                           JitterModel model = JitterModel::least_squares);

}  // namespace hom
