#include <cstdlib>
#include <string>

#include "hom/simd/kernels.hpp"

namespace hom::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(HOM_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  if (char const* env = std::getenv("HOM_SIMD"); env && std::string(env) == "scalar") {
    return Isa::scalar;
  }
  return cpu_supports(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

struct Table {
  Isa isa;
  BinDelaysFn bin_delays;
  GaussianNormalFn gaussian_normal;
};

Table const& table() {
  static Table const t = [] {
    Isa const isa = detect();
#if defined(HOM_BUILD_AVX2)
    if (isa == Isa::avx2) return Table{isa, &bin_delays_avx2, &gaussian_normal_avx2};
#endif
    return Table{Isa::scalar, &bin_delays_scalar, &gaussian_normal_scalar};
  }();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

std::uint64_t bin_delays(std::span<std::int64_t const> stops, std::int64_t start, BinSpec spec,
                         std::span<std::uint64_t> counts) {
  return table().bin_delays(stops, start, spec, counts);
}

NormalEquations gaussian_normal(std::span<double const> x, std::span<double const> y,
                                std::span<double const> w, GaussianParams const& p) {
  return table().gaussian_normal(x, y, w, p);
}

}  // namespace hom::simd
