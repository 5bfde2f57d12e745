#pragma once

// Construction of q(x, t) from a reflectionless seed Q, a spectral level mu^* and an initial
// value w0 of the Riccati solution. For each t the Weyl function of q(., t) is
//   m(t, rho) = (M(t, phi(rho)) - w(t)) / g(rho^2),
// where M(t, .) is the Weyl function of Q(. + t) and w = z'/z with -z'' + Q z = mu^* z.

#include <utility>
#include <vector>

#include "kdvbvp/soliton.hpp"
#include "kdvbvp/spectral.hpp"

namespace kdvbvp {

/// (M(T, i kappa), M(T, -i kappa)) for the seed shifted by T.
std::pair<double, double> seed_bracket(const SolitonData& seed, double kappa, double T);

class ProblemConfig {
 public:
  /// Throws config-invalid (mu_lower, seed bound) or w0-out-of-bracket.
  static ProblemConfig create(SpectralSetup setup, double mu_lower, SolitonData seed, double w0);

  const SpectralSetup& setup() const noexcept { return setup_; }
  int s() const noexcept { return setup_.s(); }
  double mu_lower() const noexcept { return mu_lower_; }
  double kappa_lower() const noexcept { return kappa_lower_; }
  const SolitonData& seed() const noexcept { return seed_; }
  double w0() const noexcept { return w0_; }
  int expected_pole_count() const noexcept { return (2 * s() + 1) * seed_.size() + 2 * s(); }

  /// z(t) = A y1(t) + B y2(t) with y1, y2 the decaying/growing Jost solutions at mu^*.
  double coeff_A() const noexcept { return A_; }
  double coeff_B() const noexcept { return B_; }

 private:
  SpectralSetup setup_;
  double mu_lower_ = 0.0;
  double kappa_lower_ = 0.0;
  SolitonData seed_;
  double w0_ = 0.0;
  double A_ = 0.0;
  double B_ = 0.0;
};

struct RiccatiValue {
  double w = 0.0;
  double lower = 0.0;  ///< M(T, i kappa^*)
  double upper = 0.0;  ///< M(T, -i kappa^*)
};

/// Closed-form solution of w' + w^2 = Q(t) - mu^*, w(0) = w0. Throws bracket-violation.
RiccatiValue riccati_w(const ProblemConfig& cfg, double T);

/// Discrete measure of m(T, .). Throws nonpositive-weight, pole-collision, or glue-mismatch when
/// the measure disagrees with the defining quotient at sample points.
DiscreteWeylFunction measure_transform(const ProblemConfig& cfg, double T);
DiscreteWeylFunction measure_transform(const ProblemConfig& cfg, double T, const RiccatiValue& w);

struct EvolvedSpectrum {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<NormingConstant> alphas_at_0;  ///< ascending in kappa
  std::vector<double> rates;                 ///< -2 Phi(kappa), aligned with alphas_at_0

  std::vector<NormingConstant> alphas_at(double T) const;
};

/// Spectrum predicted from the seed plus normalizing constants at T = 0; throws
/// classification-failure when the prediction and the T = 0 measure disagree.
EvolvedSpectrum evolve_spectrum(const ProblemConfig& cfg);

/// Soliton data of q(., T) from the measure at T. Throws roundtrip-failure if the Weyl function of
/// the result does not reproduce the measure to relative 1e-8.
SolitonData reconstruct_q(const ProblemConfig& cfg, double T);
SolitonData reconstruct_q(const DiscreteWeylFunction& measure);

/// Second route: soliton data from evolved normalizing constants.
SolitonData evolve_data(const EvolvedSpectrum& spectrum, double T);

struct SolutionSlice {
  double t = 0.0;
  RiccatiValue w;
  DiscreteWeylFunction measure;
  std::vector<Jet> jets;  ///< one per x_grid point
  Jet origin;             ///< jet at x = 0
};

struct SolutionField {
  std::vector<double> C;
  std::vector<double> a;
  std::vector<double> t_grid;
  std::vector<double> x_grid;
  int expected_pole_count = 0;
  std::vector<SolutionSlice> slices;  ///< aligned with t_grid

  int s() const { return static_cast<int>(C.size()) - 1; }
};

/// Jet order used by solve when none is requested: enough for X_s and beta_{2s+2}, and for
/// Laurent coefficients up to n = 6.
int default_jet_order(int s);

/// Slices are computed in parallel over t; results do not depend on the thread count.
SolutionField solve(const ProblemConfig& cfg, const std::vector<double>& t_grid,
                    const std::vector<double>& x_grid, int jet_order = 0);

}  // namespace kdvbvp
