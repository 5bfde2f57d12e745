#pragma once

// Reflectionless potentials and their Weyl-Marchenko functions.
//
// A potential with eigenvalues -kappa_k^2 is parametrized by Gram constants g_k > 0:
//   q(x) = -2 (d/dx)^2 log det(I + G(x)),  G_jk = sqrt(g_j g_k) e^{-(kappa_j+kappa_k) x}/(kappa_j+kappa_k).
// Its right Jost solution is e^+(x, rho) = e^{i rho x} (1 + sum_k u_k(x)/(kappa_k - i rho)) where
//   u_k + g_k e^{-2 kappa_k x} (1 + sum_j u_j/(kappa_j + kappa_k)) = 0,
// and q = -2 sum_k u_k'. With z = -i rho every quantity below is real on the imaginary axis.

#include <complex>
#include <vector>

#include "kdvbvp/diffpoly.hpp"

namespace kdvbvp {

inline constexpr int kMaxSolitons = 12;
inline constexpr int kMaxJetOrder = 16;

struct Soliton {
  double kappa = 0.0;
  double g = 0.0;
};

class SolitonData {
 public:
  SolitonData() = default;
  /// Sorts by kappa; throws config-invalid for nonpositive/duplicate kappa or g <= 0.
  explicit SolitonData(std::vector<Soliton> solitons);

  int size() const noexcept { return static_cast<int>(solitons_.size()); }
  bool empty() const noexcept { return solitons_.empty(); }
  const std::vector<Soliton>& solitons() const noexcept { return solitons_; }
  std::vector<double> kappas() const;

 private:
  std::vector<Soliton> solitons_;
};

/// Data of q(x + T): g_k -> g_k e^{-2 kappa_k T}.
SolitonData shift(const SolitonData& data, double T);

/// q and its derivatives up to `order` at x, via truncated Taylor arithmetic on log det(I + G).
Jet potential_jet(const SolitonData& data, double x, int order);

/// u_k(x) and u_k'(x) from the linear system above.
struct JostCoefficients {
  std::vector<double> u;
  std::vector<double> du;
};
JostCoefficients jost_coefficients(const SolitonData& data, double x);

/// q(x) = -2 sum u_k'(x); an evaluation route independent of potential_jet.
double potential_value(const SolitonData& data, double x);

/// e^+(x, rho) and its x-derivative at rho = i z (z real, z != -kappa_k).
struct JostValue {
  double value = 0.0;
  double derivative = 0.0;
};
JostValue jost_plus(const SolitonData& data, double x, double z);

/// Weyl-Marchenko function m(rho) from the closed-form Jost solutions (rho off the imaginary segment).
std::complex<double> weyl_value(const SolitonData& data, std::complex<double> rho);

struct WeylPole {
  double xi = 0.0;
  double weight = 0.0;
};

/// m(rho) = i rho + i sum_k w_k/(rho - i xi_k) with w_k > 0.
class DiscreteWeylFunction {
 public:
  DiscreteWeylFunction() = default;
  /// Sorts by xi; throws pole-weight-nonpositive or pole-collision.
  explicit DiscreteWeylFunction(std::vector<WeylPole> poles);

  const std::vector<WeylPole>& poles() const noexcept { return poles_; }
  int size() const noexcept { return static_cast<int>(poles_.size()); }

  std::complex<double> operator()(std::complex<double> rho) const;
  /// m(i z) = -z + sum w_k/(z - xi_k), the real restriction to the imaginary axis.
  double on_axis(double z) const;
  /// Laurent coefficient b_n of m(rho) = i rho + sum b_n/(i rho)^n: b_n = (-1)^n sum w_k xi_k^{n-1}.
  double laurent(int n) const;
  double total_weight() const;

 private:
  std::vector<WeylPole> poles_;
};

DiscreteWeylFunction weyl_function(const SolitonData& data);

struct SpectralClassification {
  std::vector<double> lambda1;    ///< eigenvalue parameters without paired poles, ascending
  std::vector<double> lambda2;    ///< eigenvalue parameters with poles at both +-kappa, ascending
  std::vector<double> lambda0_1;  ///< unpaired pole locations, ascending

  std::vector<double> all() const;  ///< lambda1 and lambda2 merged, ascending
};

struct ClassifyOptions {
  double pair_tol = 1e-8;  ///< relative distance at which +xi and -xi count as one pair
};

SpectralClassification classify(const DiscreteWeylFunction& mw, const ClassifyOptions& opt = {});

struct NormingConstant {
  double kappa = 0.0;
  double alpha = 0.0;
};

/// alpha(kappa) for every kappa in the classification, ascending in kappa.
std::vector<NormingConstant> alphas(const DiscreteWeylFunction& mw, const SpectralClassification& cls,
                                    const ClassifyOptions& opt = {});

/// Gram constants from normalizing constants: g_k = 2 kappa_k alpha_k / prod_{j!=k} (kappa_k-kappa_j)/(kappa_k+kappa_j).
/// Positivity of g forces sign(alpha_k) = (-1)^{#{j : kappa_j > kappa_k}}; anything else throws
/// inadmissible-sign. When `check_roundtrip` is set the result is pushed back through
/// weyl_function/classify/alphas and compared at relative tolerance 1e-8.
SolitonData from_alphas(const std::vector<NormingConstant>& alpha, bool check_roundtrip = true);

}  // namespace kdvbvp
