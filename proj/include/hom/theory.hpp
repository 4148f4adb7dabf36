#pragma once
// Closed-form HOM visibility model for heralded inputs with stray photons
// and stationary multimode noise. These are the analytic oracles for the
// Monte Carlo tiers.

#include "hom/core.hpp"

namespace hom {

// Mean photon numbers per window and second-order correlations.
struct TheoryPoint {
  double s = 0.0;  // signal mode (signal plus stray photons sharing it)
  double n = 0.0;  // stray photons in a mode without signal
  double N = 0.0;  // stationary noise in orthogonal modes, per input port
  double g2_s = 0.0;
  double g2_n = 1.0;
  double eta3 = 1.0;
  double eta4 = 1.0;
  double nn_corr = 0.0;  // <:N_3x N_4x:>

  void validate() const;
};

struct CoincidenceProbabilities {
  double p0 = 0.0;
  double p_inf = 0.0;
};

// Multimode forms; at N = 0, nn_corr = 0 they equal p0_p_inf_single_mode.
CoincidenceProbabilities p0_p_inf(TheoryPoint const& pt);
CoincidenceProbabilities p0_p_inf_single_mode(double s, double n, double g2_s, double g2_n,
                                              double eta3 = 1.0, double eta4 = 1.0);

// 1 - p0/p_inf; DomainError when p_inf == 0.
double visibility(CoincidenceProbabilities const& p);

// V = (1-chi)^2 / (g2_s + chi^2 g2_n + (1+chi)^2), chi = n/s. DomainError for s <= 0.
double visibility_eq1(double s, double n, double g2_s, double g2_n);

// V = (1-chi)^2 / ((1+chi)^2 (1 + g2_ex)).
double visibility_eq2(double g2_ex, double chi);

// Herald-conditioned C34 / (S3 S4) including the noise terms.
double g2_ex_theory(TheoryPoint const& pt);

// (n + N) / (s + N).
double chi_theory(TheoryPoint const& pt);

// <:N_3x N_4x:> for `modes` independent phase-randomized Poisson noise modes
// sharing mean N per input port: N^2 (1 - 1/(2 modes)). modes <= 0 gives the
// many-mode limit N^2.
double independent_noise_nn_corr(double N, int modes = 0);

// g2_s that reproduces a measured g2_ex at noise ratio chi (N = 0).
double solve_g2_s(double g2_ex, double chi, double g2_n = 1.0);

// gamma = S_sig S_idl / (C p). Rates in counts/(s nm), p in mW.
double pair_rate_gamma(double s_sig, double s_idl, double coincidences, double pump_mw);

}  // namespace hom
