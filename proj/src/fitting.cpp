#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "hom/fitting.hpp"
#include "hom/simd/kernels.hpp"

namespace hom {
namespace {

using Vec4 = Eigen::Vector4d;

Eigen::Matrix4d unpack(std::array<double, 10> const& upper) {
  Eigen::Matrix4d m;
  std::size_t k = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b, ++k) {
      m(a, b) = upper[k];
      m(b, a) = upper[k];
    }
  }
  return m;
}

simd::GaussianParams to_params(Vec4 const& p) { return {p[0], p[1], p[2], p[3]}; }

std::string describe(Vec4 const& p, int iterations) {
  std::ostringstream ss;
  ss << "amplitude=" << p[0] << " center=" << p[1] << " fwhm=" << p[2] << " baseline=" << p[3]
     << " iterations=" << iterations;
  return ss.str();
}

double median(std::vector<double> v) {
  auto const mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  double const hi = *mid;
  return 0.5 * (hi + *std::max_element(v.begin(), mid));
}

// Damped Gauss-Newton from p; returns false without convergence.
bool levenberg_marquardt(std::span<double const> x, std::span<double const> y,
                         std::span<double const> w, FitOptions const& options, Vec4& p,
                         int& iterations) {
  auto ne = simd::gaussian_normal(x, y, w, to_params(p));
  double lambda = 1e-3;
  for (iterations = 0; iterations < options.max_iterations; ++iterations) {
    Eigen::Matrix4d const jtj = unpack(ne.jtj);
    Eigen::Map<Vec4 const> const jtr(ne.jtr.data());
    Eigen::Matrix4d damped = jtj;
    for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
    Vec4 const step = damped.ldlt().solve(jtr);
    Vec4 const scale(std::abs(p[0]), p[2], p[2], std::abs(p[0]));
    bool const small = ((step.array().abs()) <=
                        options.relative_tolerance * (p.array().abs() + scale.array()))
                           .all();
    Vec4 const trial = p + step;
    if (trial[2] > 0.0 && step.allFinite()) {
      auto const ne_trial = simd::gaussian_normal(x, y, w, to_params(trial));
      if (ne_trial.sse <= ne.sse) {
        p = trial;
        ne = ne_trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        if (small) return true;
        continue;
      }
    }
    if (small) return true;
    lambda *= 10.0;
    if (lambda > 1e16) return false;
  }
  return false;
}

}  // namespace

GaussianFit fit_gaussian(std::span<double const> x, std::span<double const> y,
                         FitOptions const& options) {
  if (x.size() != y.size()) throw FitError("fit_gaussian: x and y sizes differ");
  auto const nonzero = std::count_if(y.begin(), y.end(), [](double v) { return v != 0.0; });
  if (nonzero < 5) {
    throw FitError("fit_gaussian: need at least 5 nonzero bins, got " + std::to_string(nonzero));
  }
  std::size_t const n = x.size();

  // Initial guess.
  std::size_t const quarter = std::max<std::size_t>(1, n / 4);
  std::vector<double> outer(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(quarter));
  outer.insert(outer.end(), y.end() - static_cast<std::ptrdiff_t>(quarter), y.end());
  double const baseline0 = median(outer);
  auto const peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  double const amplitude0 = y[peak] - baseline0;
  if (!(amplitude0 > 0.0)) {
    throw FitError("fit_gaussian: no peak above baseline (max " + std::to_string(y[peak]) +
                   ", baseline " + std::to_string(baseline0) + ")");
  }
  double wsum = 0.0, wvar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double const w = std::max(0.0, y[i] - baseline0);
    wsum += w;
    wvar += w * (x[i] - x[peak]) * (x[i] - x[peak]);
  }
  double const range = x.back() - x.front();
  double const spacing = n > 1 ? range / static_cast<double>(n - 1) : 1.0;
  double const fwhm_min = options.fwhm_min.value_or(0.25 * spacing);
  double const fwhm_max = options.fwhm_max.value_or(4.0 * range);
  double fwhm0 = kFwhmPerSigma * std::sqrt(wvar / wsum);
  fwhm0 = std::clamp(fwhm0, 2.0 * fwhm_min, 0.5 * fwhm_max);

  Vec4 p(amplitude0, x[peak], fwhm0, baseline0);
  auto fail = [&](Vec4 const& q, int iterations) {
    throw FitError("fit_gaussian: did not converge; " + describe(q, iterations));
  };
  int it = 0;
  if (!levenberg_marquardt(x, y, {}, options, p, it)) fail(p, it);
  // Reweight with the Poisson variance of the current model.
  std::vector<double> w(n);
  for (int pass = 0; pass < options.reweight_passes; ++pass) {
    for (std::size_t i = 0; i < n; ++i) {
      double const d = (x[i] - p[1]) / p[2];
      w[i] = 1.0 / std::max(1.0, p[3] + p[0] * std::exp(-4.0 * std::numbers::ln2 * d * d));
    }
    int pass_it = 0;
    if (!levenberg_marquardt(x, y, w, options, p, pass_it)) fail(p, it + pass_it);
    it += pass_it;
  }
  auto const ne = simd::gaussian_normal(x, y, {}, to_params(p));
  if (p[2] <= fwhm_min || p[2] >= fwhm_max) {
    throw FitError("fit_gaussian: fwhm at bound [" + std::to_string(fwhm_min) + ", " +
                   std::to_string(fwhm_max) + "]; " + describe(p, it));
  }
  if (!(p[0] > 0.0)) throw FitError("fit_gaussian: non-positive amplitude; " + describe(p, it));
  return {p[0], p[1], p[2], p[3], std::sqrt(ne.sse / static_cast<double>(n)), it};
}

GaussianFit fit_gaussian(Histogram const& hist, double lo, double hi, FitOptions const& options) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    double const c = hist.bin_center(i);
    if (c < lo || c >= hi) continue;
    x.push_back(c);
    y.push_back(static_cast<double>(hist.count(i)));
  }
  if (x.empty()) throw FitError("fit_gaussian: no bins in the requested range");
  return fit_gaussian(x, y, options);
}

GaussianFit fit_gaussian(Histogram const& hist, FitOptions const& options) {
  double const lo = static_cast<double>(hist.origin());
  return fit_gaussian(hist, lo, lo + static_cast<double>(hist.span()) + 1.0, options);
}

double deconvolve_fwhm(double measured, std::span<double const> components) {
  double radicand = measured * measured;
  for (double c : components) radicand -= c * c;
  if (radicand < 0.0) {
    throw DomainError("deconvolve_fwhm: components exceed the measured width " + std::to_string(measured));
  }
  return std::sqrt(radicand);
}

std::map<Channel, double> estimate_jitters(std::map<DetectorPair, double> const& pairwise_fwhm,
                                           JitterModel model) {
  if (pairwise_fwhm.empty()) throw AnalysisError("estimate_jitters: no detector pairs given");
  std::set<Channel> detectors;
  for (auto const& [pair, f] : pairwise_fwhm) {
    if (pair.first == pair.second) throw AnalysisError("estimate_jitters: pair of a detector with itself");
    if (!(f > 0.0)) throw AnalysisError("estimate_jitters: pairwise FWHM must be > 0");
    detectors.insert(pair.first);
    detectors.insert(pair.second);
  }
  std::map<Channel, double> out;
  if (model == JitterModel::equal) {
    double sum = 0.0;
    for (auto const& [pair, f] : pairwise_fwhm) sum += f * f / 2.0;
    double const j = std::sqrt(sum / static_cast<double>(pairwise_fwhm.size()));
    for (Channel c : detectors) out[c] = j;
    return out;
  }

  std::vector<Channel> const order(detectors.begin(), detectors.end());
  auto col = [&](Channel c) {
    return static_cast<Eigen::Index>(std::find(order.begin(), order.end(), c) - order.begin());
  };
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pairwise_fwhm.size()),
                                            static_cast<Eigen::Index>(order.size()));
  Eigen::VectorXd b(a.rows());
  Eigen::Index row = 0;
  for (auto const& [pair, f] : pairwise_fwhm) {
    a(row, col(pair.first)) = 1.0;
    a(row, col(pair.second)) = 1.0;
    b(row) = f * f;
    ++row;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < a.cols()) {
    throw AnalysisError("estimate_jitters: underdetermined (" + std::to_string(qr.rank()) +
                        " independent pairs for " + std::to_string(a.cols()) +
                        " detectors); add a pair closing an odd cycle or use the equal model");
  }
  Eigen::VectorXd const u = qr.solve(b);
  for (std::size_t i = 0; i < order.size(); ++i) {
    double const ui = u(static_cast<Eigen::Index>(i));
    if (ui < 0.0) {
      throw AnalysisError("estimate_jitters: negative squared jitter for " +
                          std::string(to_string(order[i])));
    }
    out[order[i]] = std::sqrt(ui);
  }
  return out;
}

}  // namespace hom
