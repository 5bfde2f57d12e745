#include "kdvbvp/roots.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kdvbvp {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::from_roots(std::span<const double> roots, double lead) {
  Polynomial p({lead});
  for (double r : roots) p = p * Polynomial({-r, 1.0});
  return p;
}

void Polynomial::trim() {
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> x) const {
  std::complex<double> acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
  for (size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
  for (size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return Polynomial();
  std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& a) {
  std::vector<double> c = a.c_;
  for (auto& v : c) v *= s;
  return Polynomial(std::move(c));
}

std::vector<std::complex<double>> polynomial_roots(const Polynomial& p) {
  const int n = p.degree();
  if (n < 1) return {};
  const auto& c = p.coeffs();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<size_t>(i)] / c.back();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> roots(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

double bracketed_root(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double a, double b,
                      const RootOptions& opt) {
  if (a > b) std::swap(a, b);
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw std::domain_error("bracketed_root: no sign change on bracket");

  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  int iter = 0;
  while ((b - a) > opt.bisect_tol * scale && iter++ < opt.max_iter) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }

  double x = 0.5 * (a + b);
  for (; iter < opt.max_iter; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (fa > 0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double d = df(x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::abs(next - x);
    x = next;
    if (step <= opt.polish_tol * std::max(std::abs(x), 1e-300) || (b - a) <= 4e-16 * scale) break;
  }
  return x;
}

double newton_polish(const Polynomial& p, double x0, int max_iter) {
  const Polynomial dp = p.derivative();
  double x = x0;
  double last_res = std::abs(p(x));
  for (int i = 0; i < max_iter; ++i) {
    const double d = dp(x);
    if (d == 0.0) break;
    const double next = x - p(x) / d;
    const double res = std::abs(p(next));
    if (!(res < last_res)) break;
    x = next;
    last_res = res;
    if (res == 0.0) break;
  }
  return x;
}

}  // namespace kdvbvp
