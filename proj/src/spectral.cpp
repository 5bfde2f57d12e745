#include "kdvbvp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kdvbvp/error.hpp"

namespace kdvbvp {

namespace {

constexpr double kImagTol = 1e-9;
constexpr double kDistinctTol = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

Dispersion Dispersion::build(const FlowCoefficients& coeffs) {
  const int s = coeffs.s();
  if (s < 1) throw Error(ErrorCode::config_invalid, "need at least C_0 and C_1 (s >= 1)");
  for (double c : coeffs.C) {
    if (!std::isfinite(c)) throw Error(ErrorCode::config_invalid, "flow coefficients must be finite");
  }
  const double four_s = std::ldexp(1.0, 2 * s);
  const double lead = std::ldexp(coeffs.C.back(), s - 1);
  if (std::abs(lead - four_s) > 1e-12 * four_s) {
    throw Error(ErrorCode::normalization_violated,
                "leading coefficient of phi is " + fmt(lead) + ", expected 4^s = " + fmt(four_s) +
                    " (C_s must equal 2^(s+1) = " + fmt(std::ldexp(1.0, s + 1)) + ")");
  }

  // phi(rho) = rho * sum_v C_v 2^{v-1} lambda^v, lambda = rho^2
  std::vector<double> pc(static_cast<size_t>(s) + 1);
  for (int v = 0; v <= s; ++v) pc[static_cast<size_t>(v)] = std::ldexp(coeffs.C[static_cast<size_t>(v)], v - 1);
  Polynomial even(pc);

  auto raw = polynomial_roots(even);
  const double scale = std::max(1.0, std::abs(coeffs.C[0]) / four_s);
  std::vector<double> d;
  for (auto r : raw) {
    if (std::abs(r.imag()) > kImagTol * std::max(1.0, std::abs(r))) {
      throw Error(ErrorCode::assumption1_violated,
                  "phi has a complex root lambda = " + fmt(r.real()) + (r.imag() < 0 ? "" : "+") +
                      fmt(r.imag()) + "i");
    }
    d.push_back(newton_polish(even, r.real()));
  }
  std::sort(d.begin(), d.end(), std::greater<>());
  for (double v : d) {
    if (!(v < -1e-12 * scale)) {
      throw Error(ErrorCode::assumption1_violated,
                  "root d = " + fmt(v) + " of the even factor of phi is not negative");
    }
  }
  for (size_t i = 1; i < d.size(); ++i) {
    if (d[i - 1] - d[i] <= kDistinctTol * std::abs(d[i])) {
      throw Error(ErrorCode::assumption1_violated, "repeated root d = " + fmt(d[i]));
    }
  }

  Dispersion out;
  out.d_ = d;
  for (double v : d) out.delta_.push_back(std::sqrt(-v));
  out.p_ = Polynomial::from_roots(d, four_s);
  out.f_poly_ = Polynomial({0.0, 1.0}) * out.p_ * out.p_;
  // Phi(xi) = 4^s xi prod (delta^2 - xi^2)
  Polynomial phi_xi({0.0, four_s});
  for (double dl : out.delta_) phi_xi = phi_xi * Polynomial({dl * dl, 0.0, -1.0});
  out.phi_xi_ = phi_xi;

  // f' = p (p + 2 lambda p'); the second factor changes sign on each (d_{v+1}, d_v) and (d_1, 0).
  const Polynomial dp = out.p_.derivative();
  const Polynomial r = out.p_ + Polynomial({0.0, 2.0}) * dp;
  const Polynomial dr = r.derivative();
  auto rf = [&](double x) { return r(x); };
  auto drf = [&](double x) { return dr(x); };
  double upper = 0.0;
  for (int v = 0; v < s; ++v) {
    const double lower = d[static_cast<size_t>(v)];
    out.crit_.push_back(bracketed_root(rf, drf, lower, upper));
    upper = lower;
  }
  return out;
}

std::complex<double> Dispersion::phi(std::complex<double> rho) const {
  std::complex<double> acc = std::ldexp(1.0, 2 * s()) * rho;
  for (double dl : delta_) acc *= rho * rho + dl * dl;
  return acc;
}

double Dispersion::Phi(double xi) const {
  double acc = std::ldexp(1.0, 2 * s()) * xi;
  for (double dl : delta_) acc *= (dl - xi) * (dl + xi);
  return acc;
}

double Dispersion::dPhi(double xi) const { return phi_xi_.derivative()(xi); }

double Dispersion::f(double lambda) const {
  double pv = std::ldexp(1.0, 2 * s());
  for (double v : d_) pv *= lambda - v;
  return lambda * pv * pv;
}

double Dispersion::df(double lambda) const { return f_poly_.derivative()(lambda); }

double Dispersion::mu_minus() const {
  if (crit_.empty()) {
    throw Error(ErrorCode::no_negative_critical_point, "f has no critical point on the negative axis");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double c : crit_) best = std::max(best, f(c));
  if (!(best < 0.0)) {
    throw Error(ErrorCode::no_negative_critical_point, "critical values of f are not negative");
  }
  return best;
}

LevelRoots Dispersion::roots_c(double mu) const {
  const double lo = mu_minus();
  if (!(mu > lo && mu < 0.0)) {
    throw Error(ErrorCode::mu_out_of_range,
                "mu = " + fmt(mu) + " is outside (mu_minus, 0) = (" + fmt(lo) + ", 0)");
  }
  auto F = [&](double x) { return f(x) - mu; };
  auto dF = [&](double x) { return df(x); };
  const int n = s();
  LevelRoots out;
  out.c0 = bracketed_root(F, dF, crit_[0], 0.0);
  for (int v = 0; v < n; ++v) {
    const double dv = d_[static_cast<size_t>(v)];
    const double upper = crit_[static_cast<size_t>(v)];
    out.c.push_back(bracketed_root(F, dF, dv, upper));
    double lower;
    if (v + 1 < n) {
      lower = crit_[static_cast<size_t>(v) + 1];
    } else {
      double step = 1.0;
      lower = dv - step;
      while (F(lower) > 0.0) {
        step *= 2.0;
        lower = dv - step;
      }
    }
    out.cprime.push_back(bracketed_root(F, dF, lower, dv));
  }
  for (double c : out.c) {
    if (!(df(c) < 0.0)) {
      throw Error(ErrorCode::mu_out_of_range, "root c = " + fmt(c) + " violates f'(c) < 0");
    }
  }
  return out;
}

std::vector<double> boundary_constants(const std::vector<double>& d, const std::vector<double>& c,
                                       int n_max) {
  // Series in y = 1/lambda: prod (1 - d y) / prod (1 - c y).
  const size_t len = static_cast<size_t>(n_max) + 1;
  std::vector<double> series(len, 0.0);
  series[0] = 1.0;
  for (double dv : d) {
    for (size_t k = len - 1; k >= 1; --k) series[k] -= dv * series[k - 1];
  }
  for (double cv : c) {
    for (size_t k = 1; k < len; ++k) series[k] += cv * series[k - 1];
  }
  std::vector<double> a;
  for (int n = 1; n <= n_max; ++n) a.push_back((n % 2 ? -1.0 : 1.0) * series[static_cast<size_t>(n)]);
  return a;
}

SpectralSetup SpectralSetup::create(const FlowCoefficients& coeffs, double mu_star) {
  SpectralSetup out;
  out.coeffs_ = coeffs;
  out.dispersion_ = Dispersion::build(coeffs);
  out.mu_star_ = mu_star;
  out.mu_minus_ = out.dispersion_.mu_minus();
  out.roots_ = out.dispersion_.roots_c(mu_star);
  out.gamma0_ = std::sqrt(-out.roots_.c0);
  for (double c : out.roots_.c) out.gamma_.push_back(std::sqrt(-c));
  for (double c : out.roots_.cprime) out.gamma_prime_.push_back(std::sqrt(-c));
  out.kappa_star_ = std::sqrt(-mu_star);
  out.a_ = boundary_constants(out.dispersion_.d(), out.roots_.c, out.s() + 1);
  out.g_ = Polynomial::from_roots(out.roots_.c, std::ldexp(1.0, 2 * out.s()));
  out.dg_ = out.g_.derivative();
  return out;
}

std::vector<double> SpectralSetup::xi_roots(double eta) const {
  if (std::abs(eta) > kappa_star_ * (1.0 + 1e-12)) {
    throw Error(ErrorCode::eta_out_of_range,
                "|eta| = " + fmt(std::abs(eta)) + " exceeds kappa^* = " + fmt(kappa_star_));
  }
  const Dispersion& D = dispersion_;
  auto F = [&](double x) { return D.Phi(x) - eta; };
  auto dF = [&](double x) { return D.dPhi(x); };
  auto solve = [&](double a, double b) {
    const double fa = F(a);
    const double fb = F(b);
    if ((fa > 0) == (fb > 0) && fa != 0.0 && fb != 0.0) {
      // |eta| at the edge of the admissible range: the root sits on a bracket end.
      return std::abs(fa) < std::abs(fb) ? a : b;
    }
    return bracketed_root(F, dF, a, b);
  };
  const int n = s();
  std::vector<double> xi(static_cast<size_t>(2 * n + 1));
  xi[static_cast<size_t>(n)] = solve(-gamma0_, gamma0_);
  for (int j = 1; j <= n; ++j) {
    const double g = gamma_[static_cast<size_t>(j) - 1];
    const double gp = gamma_prime_[static_cast<size_t>(j) - 1];
    xi[static_cast<size_t>(n + j)] = solve(g, gp);
    xi[static_cast<size_t>(n - j)] = solve(-gp, -g);
  }
  return xi;
}

}  // namespace kdvbvp
