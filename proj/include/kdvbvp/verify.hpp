#pragma once

// Checks on a computed field that do not reuse the construction: finite differences in t
// against the flow polynomials, boundary functionals at x = 0, Laurent coefficients of the
// measure, and the identity linking w to b_{2s}.

#include <string>
#include <vector>

#include "kdvbvp/pipeline.hpp"
#include "json.hpp"

namespace kdvbvp {

struct ResidualResult {
  double normalized = 0.0;  ///< sup |q_t - sum C X(q)| / sup |q_t| over x != 0
  double absolute = 0.0;
  double qdot_sup = 0.0;
  double at_origin = 0.0;   ///< normalized residual on x = 0 grid points, reported only
  double worst_t = 0.0;
  double worst_x = 0.0;
};

/// Needs a uniform t grid with at least 5 points (grid-too-coarse) and jets of order >= 2s+1
/// (jet-too-short). Interior t points only.
ResidualResult pde_residual(const SolutionField& field, const std::vector<double>& C);

struct CheckResult {
  double value = 0.0;
  double worst_t = 0.0;
  std::string where;  ///< which functional attained the maximum
};

/// max over t of |b_{2n}| (n < s) and |b_{2n-1} - a_n| (n <= s+1) from the x = 0 jets.
CheckResult boundary_residual(const SolutionField& field, const std::vector<double>& a);

/// max over t and n <= n_max of |b_n(measure) - b_n(jet)| / max(1, |b_n(jet)|).
CheckResult laurent_crosscheck(const SolutionField& field, int n_max = 6);

/// max over t of |w - (-1)^{s-1} 4^s b_{2s}| / (1 + |w|).
CheckResult remark42_check(const SolutionField& field);

struct Tolerances {
  double residual = 1e-6;
  double boundary = 1e-8;
  double laurent = 1e-8;
  double remark42 = 1e-7;
};

struct CheckDetail {
  std::string check;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct VerificationReport {
  double residual_sup = 0.0;
  double boundary_max_err = 0.0;
  double laurent_max_err = 0.0;
  double remark42_max_err = 0.0;
  bool bracket_ok = false;
  bool pole_count_ok = false;
  std::vector<CheckDetail> details;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Runs every check. The residual check is skipped (and reported as such) when the t grid
/// cannot carry the stencil.
VerificationReport verify(const SolutionField& field, const Tolerances& tol = {});

}  // namespace kdvbvp
