// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "hom/simd/kernels.hpp"

namespace hom::simd {
namespace {

// int64 <-> double for |v| < 2^51 via the 1.5 * 2^52 magic constant.
inline __m256d i64_to_f64(__m256i v) {
  __m256i const magic_i = _mm256_castpd_si256(_mm256_set1_pd(6755399441055744.0));
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, magic_i)),
                       _mm256_set1_pd(6755399441055744.0));
}

inline __m256i f64_to_i64(__m256d v) {
  __m256d const magic = _mm256_set1_pd(6755399441055744.0);
  return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, magic)),
                          _mm256_castpd_si256(magic));
}

// exp(x) for x <= 0; returns 0 below -708.
inline __m256d exp_nonpositive(__m256d x) {
  __m256d const lo = _mm256_set1_pd(-708.0);
  __m256d const underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);

  __m256d const n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(std::numbers::log2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  // ln2 split into exactly representable high part and remainder.
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  // Taylor series to degree 12 on |r| <= ln2/2.
  __m256d poly = _mm256_set1_pd(1.0 / 479001600.0);
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 39916800.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 3628800.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 362880.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 40320.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 5040.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 720.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 120.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 24.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0 / 6.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(0.5));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0));
  poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(1.0));

  __m256i const bias = _mm256_add_epi64(f64_to_i64(n), _mm256_set1_epi64x(1023));
  __m256d const scale = _mm256_castsi256_pd(_mm256_slli_epi64(bias, 52));
  return _mm256_andnot_pd(underflow, _mm256_mul_pd(poly, scale));
}

inline double hsum(__m256d v) {
  __m128d const lo = _mm256_castpd256_pd128(v);
  __m128d const hi = _mm256_extractf128_pd(v, 1);
  __m128d const s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

std::uint64_t bin_delays_avx2(std::span<std::int64_t const> stops, std::int64_t start,
                              BinSpec spec, std::span<std::uint64_t> counts) {
  std::int64_t const limit = spec.bin_width * static_cast<std::int64_t>(spec.n_bins);
  __m256i const offset = _mm256_set1_epi64x(start + spec.origin);
  __m256i const vlimit = _mm256_set1_epi64x(limit);
  __m256i const zero = _mm256_setzero_si256();
  __m256d const width = _mm256_set1_pd(static_cast<double>(spec.bin_width));

  std::uint64_t out = 0;
  std::size_t i = 0;
  alignas(32) std::int64_t bins[4];
  for (; i + 4 <= stops.size(); i += 4) {
    __m256i const d = _mm256_sub_epi64(
        _mm256_loadu_si256(reinterpret_cast<__m256i const*>(stops.data() + i)), offset);
    // valid = d >= 0 && d < limit
    __m256i const neg = _mm256_cmpgt_epi64(zero, d);
    __m256i const high = _mm256_cmpgt_epi64(d, _mm256_sub_epi64(vlimit, _mm256_set1_epi64x(1)));
    int const bad = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_or_si256(neg, high)));
    // Correctly rounded division of exact integers below 2^51 floors exactly.
    __m256d const q = _mm256_floor_pd(_mm256_div_pd(i64_to_f64(d), width));
    _mm256_store_si256(reinterpret_cast<__m256i*>(bins), f64_to_i64(q));
    for (int lane = 0; lane < 4; ++lane) {
      if (bad & (1 << lane)) {
        ++out;
      } else {
        ++counts[static_cast<std::size_t>(bins[lane])];
      }
    }
  }
  return out + bin_delays_scalar(stops.subspan(i), start, spec, counts);
}

NormalEquations gaussian_normal_avx2(std::span<double const> x, std::span<double const> y,
                                     std::span<double const> w, GaussianParams const& p) {
  constexpr double k4ln2 = 4.0 * std::numbers::ln2;
  double const inv_f2 = 1.0 / (p.fwhm * p.fwhm);
  __m256d const center = _mm256_set1_pd(p.center);
  __m256d const neg_k = _mm256_set1_pd(-k4ln2 * inv_f2);
  __m256d const amp = _mm256_set1_pd(p.amplitude);
  __m256d const base = _mm256_set1_pd(p.baseline);
  __m256d const dscale = _mm256_set1_pd(p.amplitude * 2.0 * k4ln2 * inv_f2);
  __m256d const inv_f = _mm256_set1_pd(1.0 / p.fwhm);
  __m256d const one = _mm256_set1_pd(1.0);

  __m256d jtj[10];
  __m256d jtr[4];
  for (auto& v : jtj) v = _mm256_setzero_pd();
  for (auto& v : jtr) v = _mm256_setzero_pd();
  __m256d sse = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    __m256d const dx = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), center);
    __m256d const e = exp_nonpositive(_mm256_mul_pd(neg_k, _mm256_mul_pd(dx, dx)));
    __m256d const r =
        _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), _mm256_fmadd_pd(amp, e, base));
    __m256d const ae = _mm256_mul_pd(dscale, e);
    __m256d const jc = _mm256_mul_pd(ae, dx);
    __m256d const wi = w.empty() ? one : _mm256_loadu_pd(w.data() + i);
    __m256d const j[4] = {e, jc, _mm256_mul_pd(_mm256_mul_pd(jc, dx), inv_f), one};
    std::size_t k = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      __m256d const wj = _mm256_mul_pd(wi, j[a]);
      for (std::size_t b = a; b < 4; ++b, ++k) jtj[k] = _mm256_fmadd_pd(wj, j[b], jtj[k]);
      jtr[a] = _mm256_fmadd_pd(wj, r, jtr[a]);
    }
    sse = _mm256_fmadd_pd(_mm256_mul_pd(wi, r), r, sse);
  }

  NormalEquations ne =
      gaussian_normal_scalar(x.subspan(i), y.subspan(i), w.empty() ? w : w.subspan(i), p);
  for (std::size_t k = 0; k < 10; ++k) ne.jtj[k] += hsum(jtj[k]);
  for (std::size_t a = 0; a < 4; ++a) ne.jtr[a] += hsum(jtr[a]);
  ne.sse += hsum(sse);
  return ne;
}

}  // namespace hom::simd
