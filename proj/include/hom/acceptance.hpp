#pragma once
// The reproduction checks: closed-form values, Monte Carlo agreement with
// the visibility formulas and full-pipeline shape and timing checks.

#include <cstdint>
#include <string>
#include <vector>

namespace hom {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
};

CriterionResult criterion_eq2_point(AcceptanceOptions const& options);
CriterionResult criterion_count_visibility(AcceptanceOptions const& options);
CriterionResult criterion_identities(AcceptanceOptions const& options);
CriterionResult criterion_monte_carlo_eq1(AcceptanceOptions const& options);
CriterionResult criterion_noise_invariance(AcceptanceOptions const& options);
CriterionResult criterion_pipeline_shape(AcceptanceOptions const& options);
CriterionResult criterion_deconvolution(AcceptanceOptions const& options);
CriterionResult criterion_dip_limits(AcceptanceOptions const& options);
CriterionResult criterion_pair_rate(AcceptanceOptions const& options);

std::vector<CriterionResult> run_acceptance(AcceptanceOptions const& options);

// "[PASS] 1 name: detail (0.00 s)"
std::string format_result(CriterionResult const& r);

}  // namespace hom
