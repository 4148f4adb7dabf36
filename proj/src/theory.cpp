#include <cmath>
#include <string>

#include "hom/theory.hpp"

namespace hom {

void TheoryPoint::validate() const {
  auto nonneg = [](double v, char const* name) {
    if (!(v >= 0.0)) throw DomainError(std::string("theory point: ") + name + " must be >= 0");
  };
  nonneg(s, "s");
  nonneg(n, "n");
  nonneg(N, "N");
  nonneg(g2_s, "g2_s");
  nonneg(g2_n, "g2_n");
  nonneg(nn_corr, "nn_corr");
  if (!(eta3 >= 0.0 && eta3 <= 1.0) || !(eta4 >= 0.0 && eta4 <= 1.0)) {
    throw DomainError("theory point: eta3/eta4 must be in [0, 1]");
  }
}

CoincidenceProbabilities p0_p_inf(TheoryPoint const& pt) {
  pt.validate();
  double const bunch = (pt.s * pt.s * pt.g2_s + pt.n * pt.n * pt.g2_n) / 2.0;
  double const noise = 2.0 * pt.N * pt.N + 4.0 * pt.N * (pt.s + pt.n) + 2.0 * pt.nn_corr;
  double const eta = pt.eta3 * pt.eta4;
  double const sum = pt.s + pt.n;
  return {eta * (bunch + noise + 2.0 * pt.s * pt.n), eta * (bunch + noise + sum * sum / 2.0)};
}

CoincidenceProbabilities p0_p_inf_single_mode(double s, double n, double g2_s, double g2_n,
                                              double eta3, double eta4) {
  double const a = s * s * g2_s + n * n * g2_n;
  double const eta = eta3 * eta4;
  return {eta * (a + 4.0 * s * n) / 2.0, eta * (a + (s + n) * (s + n)) / 2.0};
}

double visibility(CoincidenceProbabilities const& p) {
  if (!(p.p_inf > 0.0)) throw DomainError("visibility: P_inf must be > 0");
  return 1.0 - p.p0 / p.p_inf;
}

double visibility_eq1(double s, double n, double g2_s, double g2_n) {
  if (!(s > 0.0)) throw DomainError("visibility_eq1: s must be > 0");
  double const chi = n / s;
  return (1.0 - chi) * (1.0 - chi) / (g2_s + chi * chi * g2_n + (1.0 + chi) * (1.0 + chi));
}

double visibility_eq2(double g2_ex, double chi) {
  if (!(chi >= 0.0) || !(g2_ex >= 0.0)) throw DomainError("visibility_eq2: chi and g2_ex must be >= 0");
  return (1.0 - chi) * (1.0 - chi) / ((1.0 + chi) * (1.0 + chi) * (1.0 + g2_ex));
}

double g2_ex_theory(TheoryPoint const& pt) {
  pt.validate();
  double const den = pt.s + pt.n + 2.0 * pt.N;
  if (!(den > 0.0)) throw DomainError("g2_ex_theory: s + n + 2N must be > 0");
  double const num = pt.s * pt.s * pt.g2_s + pt.n * pt.n * pt.g2_n + 4.0 * pt.N * (pt.s + pt.n) +
                     4.0 * pt.nn_corr;
  return num / (den * den);
}

double chi_theory(TheoryPoint const& pt) {
  if (!(pt.s + pt.N > 0.0)) throw DomainError("chi_theory: s + N must be > 0");
  return (pt.n + pt.N) / (pt.s + pt.N);
}

double independent_noise_nn_corr(double N, int modes) {
  if (modes <= 0) return N * N;
  return N * N * (1.0 - 1.0 / (2.0 * modes));
}

double solve_g2_s(double g2_ex, double chi, double g2_n) {
  double const g = g2_ex * (1.0 + chi) * (1.0 + chi) - chi * chi * g2_n;
  if (g < 0.0) throw DomainError("solve_g2_s: no admissible g2_s for these inputs");
  return g;
}

double pair_rate_gamma(double s_sig, double s_idl, double coincidences, double pump_mw) {
  if (!(coincidences > 0.0)) throw DomainError("pair_rate_gamma: coincidence rate must be > 0");
  if (!(pump_mw > 0.0)) throw DomainError("pair_rate_gamma: pump power must be > 0");
  return s_sig * s_idl / (coincidences * pump_mw);
}

}  // namespace hom
