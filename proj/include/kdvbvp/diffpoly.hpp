#pragma once

// Exact differential polynomials in q, q', q'', ... over the rationals.
//
// A DiffPoly is a sum of monomials c * prod_k (q^{(k)})^{e_k}. It is kept in
// canonical form: monomials sorted by (total differential order sum k*e_k,
// exponent vector), no zero coefficients, no duplicate power maps. With that,
// structural equality is polynomial equality.

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kdvbvp {

using Rational = boost::multiprecision::cpp_rational;

/// Derivative tower [q(x0), q'(x0), ..., q^{(K)}(x0)].
class Jet {
 public:
  Jet() = default;
  explicit Jet(std::vector<double> values) : values_(std::move(values)) {}

  int order() const noexcept { return static_cast<int>(values_.size()) - 1; }
  double operator[](int k) const { return values_[static_cast<size_t>(k)]; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }

 private:
  std::vector<double> values_;
};

/// Power map of a monomial: derivative order k -> exponent of q^{(k)}.
using PowerMap = std::map<int, int>;

struct DiffMonomial {
  Rational coeff;
  PowerMap powers;

  /// sum_k k * e_k
  int differential_order() const;
  /// max k with e_k > 0, or -1 for a constant.
  int max_derivative() const;
};

class DiffPoly {
 public:
  DiffPoly() = default;
  /// Constant polynomial.
  DiffPoly(const Rational& c);  // NOLINT(google-explicit-constructor)
  DiffPoly(long c) : DiffPoly(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  /// The variable q^{(k)}.
  static DiffPoly var(int k);
  static DiffPoly monomial(const Rational& c, PowerMap powers);

  const std::vector<DiffMonomial>& monomials() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Highest derivative order present, -1 for a constant or zero.
  int max_derivative() const;

  DiffPoly operator-() const;
  friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  DiffPoly& operator+=(const DiffPoly& b) { return *this = *this + b; }
  DiffPoly& operator-=(const DiffPoly& b) { return *this = *this - b; }
  DiffPoly& operator*=(const DiffPoly& b) { return *this = *this * b; }

  friend bool operator==(const DiffPoly& a, const DiffPoly& b);

  /// Rendering such as "(3/2)*q0*q1 + (-1/4)*q3"; qk stands for q^{(k)}.
  std::string to_string() const;

 private:
  void canonicalize();
  std::vector<DiffMonomial> terms_;
};

/// Total x-derivative (Leibniz rule, q^{(k)} -> q^{(k+1)}).
DiffPoly ddx(const DiffPoly& p);

/// Exact antiderivative with zero integration constant. Throws antiderivative-not-exact
/// when p is not a total derivative.
DiffPoly antiderivative(const DiffPoly& p);

/// H p = -1/2 p''' + 2 q p' + q' p
DiffPoly apply_H(const DiffPoly& p);

struct FlowLimits {
  int max_nu = 6;
  int max_beta = 12;
};

/// KdV hierarchy flow X_nu (P_1 = -q/2, P'_{nu+1} = H P_nu, X_nu = -P'_{nu+1}).
DiffPoly kdv_flow(int nu, const FlowLimits& limits = {});

/// Antiderivative P_nu of the recurrence, nu >= 1.
DiffPoly kdv_potential(int nu, const FlowLimits& limits = {});

/// beta_1 = q, beta_{n+1} = -beta_n' - sum_{v=1}^{n-1} beta_v beta_{n-v}.
DiffPoly beta_poly(int n, const FlowLimits& limits = {});

/// Substitute jet values. Throws jet-too-short.
double eval_jet(const DiffPoly& p, const Jet& jet);

/// b_n = 2^{-n} beta_n evaluated on the jet at x = 0.
double b_n_eval(int n, const Jet& jet, const FlowLimits& limits = {});

}  // namespace kdvbvp
