#pragma once

// Dispersion polynomial of a general KdV flow and the root structure built on it.
//
// phi(rho) = 1/2 rho sum_v C_v (2 rho^2)^v must factor as 4^s rho prod (rho^2 + delta_v^2)
// with 0 < delta_1 < ... < delta_s. Writing d_v = -delta_v^2, f(lambda) = lambda p(lambda)^2
// with p(lambda) = 4^s prod (lambda - d_v), so that phi(rho)^2 = f(rho^2). On the imaginary
// axis phi(i xi) = i Phi(xi) with Phi(xi) = 4^s xi prod (delta_v^2 - xi^2) real.

#include <complex>
#include <vector>

#include "kdvbvp/roots.hpp"

namespace kdvbvp {

struct FlowCoefficients {
  std::vector<double> C;  ///< C_0 .. C_s
  int s() const { return static_cast<int>(C.size()) - 1; }
};

/// Roots c_0 > c_1 > c'_1 > ... > c_s > c'_s of f(lambda) = mu.
struct LevelRoots {
  double c0 = 0.0;
  std::vector<double> c;
  std::vector<double> cprime;
};

class Dispersion {
 public:
  /// Validates normalization and the real-negative-distinct root condition.
  /// Throws normalization-violated or assumption1-violated.
  static Dispersion build(const FlowCoefficients& coeffs);

  int s() const noexcept { return static_cast<int>(d_.size()); }
  /// d_1 > d_2 > ... > d_s (all negative).
  const std::vector<double>& d() const noexcept { return d_; }
  /// 0 < delta_1 < ... < delta_s.
  const std::vector<double>& delta() const noexcept { return delta_; }

  std::complex<double> phi(std::complex<double> rho) const;
  double Phi(double xi) const;
  double dPhi(double xi) const;

  double f(double lambda) const;
  double df(double lambda) const;

  /// Critical points of f on the negative axis, one per interval (d_1, 0), (d_2, d_1), ...
  /// returned in descending order.
  const std::vector<double>& critical_points() const noexcept { return crit_; }

  /// Largest local-minimum value of f on the negative axis.
  double mu_minus() const;

  /// Throws mu-out-of-range unless mu lies in (mu_minus, 0).
  LevelRoots roots_c(double mu) const;

 private:
  std::vector<double> d_;
  std::vector<double> delta_;
  Polynomial p_;       // 4^s prod (lambda - d_v)
  Polynomial f_poly_;  // lambda p^2
  Polynomial phi_xi_;  // Phi as a polynomial in xi
  std::vector<double> crit_;
};

/// a_1..a_{n_max} from prod (lambda - d_v)/(lambda - c_v) = 1 + sum (-1)^n a_n / lambda^n.
std::vector<double> boundary_constants(const std::vector<double>& d, const std::vector<double>& c,
                                       int n_max);

class SpectralSetup {
 public:
  static SpectralSetup create(const FlowCoefficients& coeffs, double mu_star);

  int s() const noexcept { return dispersion_.s(); }
  const FlowCoefficients& coefficients() const noexcept { return coeffs_; }
  const Dispersion& dispersion() const noexcept { return dispersion_; }

  double mu_star() const noexcept { return mu_star_; }
  double mu_minus() const noexcept { return mu_minus_; }
  const LevelRoots& roots() const noexcept { return roots_; }
  double gamma0() const noexcept { return gamma0_; }
  const std::vector<double>& gamma() const noexcept { return gamma_; }
  const std::vector<double>& gamma_prime() const noexcept { return gamma_prime_; }
  /// kappa^* = sqrt(-mu^*)
  double kappa_star_upper() const noexcept { return kappa_star_; }
  /// Boundary constants a_1..a_{s+1} at mu^*.
  const std::vector<double>& a() const noexcept { return a_; }

  /// g(lambda) = 4^s prod (lambda - c_v)
  double g(double lambda) const { return g_(lambda); }
  std::complex<double> g(std::complex<double> lambda) const { return g_(lambda); }
  double g_prime(double lambda) const { return dg_(lambda); }

  /// Solutions xi_{-s}..xi_s of Phi(xi) = eta, index j + s. Throws eta-out-of-range if
  /// |eta| > kappa^*.
  std::vector<double> xi_roots(double eta) const;

 private:
  FlowCoefficients coeffs_;
  Dispersion dispersion_;
  double mu_star_ = 0.0;
  double mu_minus_ = 0.0;
  LevelRoots roots_;
  double gamma0_ = 0.0;
  std::vector<double> gamma_;
  std::vector<double> gamma_prime_;
  double kappa_star_ = 0.0;
  std::vector<double> a_;
  Polynomial g_;
  Polynomial dg_;
};

}  // namespace kdvbvp
