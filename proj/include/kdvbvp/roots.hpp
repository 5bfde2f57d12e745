#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace kdvbvp {

/// Real polynomial, coefficients in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  /// prod (x - r) for the given roots, scaled by lead.
  static Polynomial from_roots(std::span<const double> roots, double lead = 1.0);

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const noexcept { return c_; }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> x) const;
  Polynomial derivative() const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

 private:
  void trim();
  std::vector<double> c_;
};

/// All roots of p via the companion matrix eigenvalues.
std::vector<std::complex<double>> polynomial_roots(const Polynomial& p);

struct RootOptions {
  double bisect_tol = 1e-6;   ///< relative bracket width before switching to Newton
  double polish_tol = 1e-13;  ///< relative Newton step at which polishing stops
  int max_iter = 400;
};

/// Root of f in [a, b] where f(a), f(b) have opposite signs (or one is zero).
/// Bisection narrows the bracket, Newton then polishes inside it; a Newton
/// step leaving the bracket falls back to bisection.
double bracketed_root(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double a, double b,
                      const RootOptions& opt = {});

/// Newton iterations on a polynomial starting from x0, clamped to at most max_iter.
double newton_polish(const Polynomial& p, double x0, int max_iter = 50);

}  // namespace kdvbvp
