#include "kdvbvp/soliton.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/float128.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "kdvbvp/error.hpp"
#include "kdvbvp/roots.hpp"
#include "kdvbvp/taylor.hpp"

namespace kdvbvp {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

bool near(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(a)); }

}  // namespace

SolitonData::SolitonData(std::vector<Soliton> solitons) : solitons_(std::move(solitons)) {
  if (static_cast<int>(solitons_.size()) > kMaxSolitons) {
    throw Error(ErrorCode::cap_exceeded, std::to_string(solitons_.size()) +
                                             " solitons exceed the limit " + std::to_string(kMaxSolitons));
  }
  std::sort(solitons_.begin(), solitons_.end(),
            [](const Soliton& a, const Soliton& b) { return a.kappa < b.kappa; });
  for (size_t i = 0; i < solitons_.size(); ++i) {
    const auto& s = solitons_[i];
    if (!(s.kappa > 0.0) || !std::isfinite(s.kappa)) {
      throw Error(ErrorCode::config_invalid, "soliton kappa must be positive, got " + fmt(s.kappa));
    }
    if (!(s.g > 0.0) || !std::isfinite(s.g)) {
      throw Error(ErrorCode::config_invalid, "soliton g must be positive, got " + fmt(s.g));
    }
    if (i > 0 && solitons_[i - 1].kappa == s.kappa) {
      throw Error(ErrorCode::config_invalid, "duplicate soliton kappa " + fmt(s.kappa));
    }
  }
}

std::vector<double> SolitonData::kappas() const {
  std::vector<double> k;
  for (const auto& s : solitons_) k.push_back(s.kappa);
  return k;
}

SolitonData shift(const SolitonData& data, double T) {
  std::vector<Soliton> out = data.solitons();
  for (auto& s : out) s.g *= std::exp(-2.0 * s.kappa * T);
  return SolitonData(std::move(out));
}

namespace {

// det(I + G) with G = D C D, D = diag(sqrt(g_k) e^{-kappa_k x}), C_jk = 1/(kappa_j + kappa_k).
// Rows and columns with d_k > 1 are divided by d_k; the factor prod d_k^2 this removes is
// log-linear in x, so M = diag(delta) + D' C D' carries all of q, and its entries are O(1):
//   delta_k = 1/d_k^2, D'_k = 1      (d_k > 1)
//   delta_k = 1,       D'_k = d_k    (otherwise)
using Ext = boost::multiprecision::float128;

Ext xexp(Ext v) { return boost::multiprecision::exp(v); }
Ext xlog(Ext v) { return boost::multiprecision::log(v); }
Ext xabs(Ext v) { return boost::multiprecision::abs(v); }
bool xfinite(Ext v) { return boost::multiprecision::isfinite(v); }

struct ScaledGram {
  std::vector<bool> big;
  std::vector<Ext> log_d;  // log d_k at x
};

ScaledGram scaled_gram(const SolitonData& data, double x) {
  ScaledGram sg;
  for (const auto& s : data.solitons()) {
    const Ext ld = Ext(0.5) * xlog(static_cast<Ext>(s.g)) - static_cast<Ext>(s.kappa) * x;
    sg.log_d.push_back(ld);
    sg.big.push_back(ld > 0);
  }
  return sg;
}

}  // namespace

Jet potential_jet(const SolitonData& data, double x, int order) {
  if (order < 0 || order > kMaxJetOrder) {
    throw Error(ErrorCode::cap_exceeded, "jet order " + std::to_string(order) + " outside [0, " +
                                             std::to_string(kMaxJetOrder) + "]");
  }
  const int n = data.size();
  if (n == 0) return Jet(std::vector<double>(static_cast<size_t>(order) + 1, 0.0));

  const int N = order + 2;
  const auto& s = data.solitons();
  const ScaledGram sg = scaled_gram(data, x);
  using T = BasicTaylor<Ext>;
  std::vector<T> a(static_cast<size_t>(n * n));
  auto at = [&](int i, int j) -> T& { return a[static_cast<size_t>(i * n + j)]; };
  auto dprime_log = [&](int k) { return sg.big[k] ? Ext(0) : sg.log_d[k]; };
  auto dprime_rate = [&](int k) { return sg.big[k] ? Ext(0) : -static_cast<Ext>(s[k].kappa); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Ext amp = xexp(dprime_log(i) + dprime_log(j)) / (static_cast<Ext>(s[i].kappa) + s[j].kappa);
      at(i, j) = T::exponential(N, amp, dprime_rate(i) + dprime_rate(j));
    }
    if (sg.big[i]) {
      at(i, i) += T::exponential(N, xexp(-Ext(2) * sg.log_d[i]), Ext(2) * s[i].kappa);
    } else {
      at(i, i)[0] += Ext(1);
    }
  }
  // M is symmetric positive definite: elimination without pivoting, log det = sum log pivots.
  // Clustered kappa make the Cauchy part nearly singular, hence extended precision.
  T logdet(N, Ext(0));
  for (int k = 0; k < n; ++k) {
    const T& pivot = at(k, k);
    if (!(pivot[0] > Ext(0)) || !xfinite(pivot[0])) {
      throw Error(ErrorCode::singular_matrix, "nonpositive pivot in the Gram determinant at x = " + fmt(x));
    }
    logdet += log(pivot);
    for (int r = k + 1; r < n; ++r) {
      const T factor = at(r, k) / pivot;
      for (int c = k + 1; c < n; ++c) at(r, c) -= factor * at(k, c);
    }
  }
  std::vector<double> q(static_cast<size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) q[static_cast<size_t>(k)] = static_cast<double>(-Ext(2) * logdet.derivative(k + 2));
  return Jet(std::move(q));
}

namespace {

struct JostExt {
  std::vector<Ext> u;
  std::vector<Ext> du;
};

// u = D' y and u' = D' z with M y = -D' 1 and M z = -2 delta kappa y, M as in potential_jet.
// The remaining Cauchy block can still be ill-conditioned for clustered kappa, hence extended precision.
JostExt jost_ext(const SolitonData& data, double x) {
  const int n = data.size();
  const auto& s = data.solitons();
  const ScaledGram sg = scaled_gram(data, x);
  std::vector<Ext> A(static_cast<size_t>(n * n));
  std::vector<Ext> dp(static_cast<size_t>(n));
  std::vector<Ext> delta(static_cast<size_t>(n));
  auto at = [&](int i, int j) -> Ext& { return A[static_cast<size_t>(i * n + j)]; };
  for (int k = 0; k < n; ++k) {
    dp[k] = sg.big[k] ? Ext(1) : xexp(sg.log_d[k]);
    delta[k] = sg.big[k] ? xexp(-Ext(2) * sg.log_d[k]) : Ext(1);
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) at(k, j) = dp[k] * dp[j] / (static_cast<Ext>(s[j].kappa) + s[k].kappa);
    at(k, k) += delta[k];
  }
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (xabs(at(r, c)) > xabs(at(piv, c))) piv = r;
    }
    if (at(piv, c) == Ext(0)) throw Error(ErrorCode::singular_matrix, "Jost coefficient system is singular at x = " + fmt(x));
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(at(c, j), at(piv, j));
      std::swap(perm[c], perm[piv]);
    }
    for (int r = c + 1; r < n; ++r) {
      at(r, c) /= at(c, c);
      for (int j = c + 1; j < n; ++j) at(r, j) -= at(r, c) * at(c, j);
    }
  }
  auto lu_solve = [&](const std::vector<Ext>& b) {
    std::vector<Ext> y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      Ext v = b[perm[i]];
      for (int j = 0; j < i; ++j) v -= at(i, j) * y[j];
      y[i] = v;
    }
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) y[i] -= at(i, j) * y[j];
      y[i] /= at(i, i);
    }
    return y;
  };
  JostExt out;
  std::vector<Ext> rhs(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) rhs[k] = -dp[k];
  const std::vector<Ext> y = lu_solve(rhs);
  for (int k = 0; k < n; ++k) rhs[k] = -Ext(2) * delta[k] * s[k].kappa * y[k];
  const std::vector<Ext> z = lu_solve(rhs);
  for (int k = 0; k < n; ++k) {
    out.u.push_back(dp[k] * y[k]);
    out.du.push_back(dp[k] * z[k]);
  }
  for (int k = 0; k < n; ++k) {
    if (!xfinite(out.u[k]) || !xfinite(out.du[k])) {
      throw Error(ErrorCode::singular_matrix, "Jost coefficient system is singular at x = " + fmt(x));
    }
  }
  return out;
}

}  // namespace

JostCoefficients jost_coefficients(const SolitonData& data, double x) {
  JostCoefficients out;
  if (data.empty()) return out;
  const JostExt e = jost_ext(data, x);
  for (size_t k = 0; k < e.u.size(); ++k) {
    out.u.push_back(static_cast<double>(e.u[k]));
    out.du.push_back(static_cast<double>(e.du[k]));
  }
  return out;
}

double potential_value(const SolitonData& data, double x) {
  const auto jc = jost_coefficients(data, x);
  double q = 0.0;
  for (double d : jc.du) q -= 2.0 * d;
  return q;
}

JostValue jost_plus(const SolitonData& data, double x, double z) {
  const auto jc = jost_coefficients(data, x);
  const auto& s = data.solitons();
  double h = 1.0;
  double hx = 0.0;
  for (size_t k = 0; k < s.size(); ++k) {
    h += jc.u[k] / (s[k].kappa + z);
    hx += jc.du[k] / (s[k].kappa + z);
  }
  const double e = std::exp(-z * x);
  return {e * h, e * (hx - z * h)};
}

namespace {

// m(rho) - i rho = h_x/h with h = 1 + sum u_k/(kappa_k + z), z = -i rho. The e^- branch in the
// lower half-plane differs from e^+ by an x-independent factor, so both halves share this form.
std::complex<double> weyl_closed_form(const SolitonData& data, const JostCoefficients& jc,
                                      std::complex<double> rho, bool upper) {
  const auto& s = data.solitons();
  const std::complex<double> z = -std::complex<double>(0.0, 1.0) * rho;
  std::complex<double> h = 1.0;
  std::complex<double> hx = 0.0;
  for (size_t k = 0; k < s.size(); ++k) {
    h += jc.u[k] / (s[k].kappa + z);
    hx += jc.du[k] / (s[k].kappa + z);
  }
  if (!upper) {
    // e^-(x, rho) = e^+(x, rho) prod (z + kappa)/(z - kappa)
    std::complex<double> factor = 1.0;
    for (const auto& sk : s) factor *= (z + sk.kappa) / (z - sk.kappa);
    h *= factor;
    hx *= factor;
  }
  return std::complex<double>(0.0, 1.0) * rho + hx / h;
}

}  // namespace

std::complex<double> weyl_value(const SolitonData& data, std::complex<double> rho) {
  const auto jc = jost_coefficients(data, 0.0);
  return weyl_closed_form(data, jc, rho, rho.imag() >= 0.0);
}

DiscreteWeylFunction::DiscreteWeylFunction(std::vector<WeylPole> poles) : poles_(std::move(poles)) {
  std::sort(poles_.begin(), poles_.end(), [](const WeylPole& a, const WeylPole& b) { return a.xi < b.xi; });
  for (size_t i = 0; i < poles_.size(); ++i) {
    if (!(poles_[i].weight > 0.0) || !std::isfinite(poles_[i].weight)) {
      throw Error(ErrorCode::pole_weight_nonpositive,
                  "pole at xi = " + fmt(poles_[i].xi) + " has weight " + fmt(poles_[i].weight));
    }
    if (i > 0 && poles_[i].xi == poles_[i - 1].xi) {
      throw Error(ErrorCode::pole_collision, "two poles at xi = " + fmt(poles_[i].xi));
    }
  }
}

std::complex<double> DiscreteWeylFunction::operator()(std::complex<double> rho) const {
  const std::complex<double> I(0.0, 1.0);
  std::complex<double> sum = 0.0;
  for (const auto& p : poles_) sum += p.weight / (rho - I * p.xi);
  return I * rho + I * sum;
}

double DiscreteWeylFunction::on_axis(double z) const {
  double v = -z;
  for (const auto& p : poles_) v += p.weight / (z - p.xi);
  return v;
}

double DiscreteWeylFunction::laurent(int n) const {
  double sum = 0.0;
  for (const auto& p : poles_) sum += p.weight * std::pow(p.xi, n - 1);
  return (n % 2 ? -1.0 : 1.0) * sum;
}

double DiscreteWeylFunction::total_weight() const {
  double sum = 0.0;
  for (const auto& p : poles_) sum += p.weight;
  return sum;
}

namespace {

DiscreteWeylFunction weyl_function_direct(const SolitonData& data) {
  const int n = data.size();
  const JostExt je = jost_ext(data, 0.0);
  JostCoefficients jc;
  for (int k = 0; k < n; ++k) {
    jc.u.push_back(static_cast<double>(je.u[k]));
    jc.du.push_back(static_cast<double>(je.du[k]));
  }
  const auto& s = data.solitons();

  // m(i z) + z = N(z)/P(z) with P(z) = prod (kappa_j + z) + sum_k u_k prod_{j!=k} (kappa_j + z)
  // and N(z) = sum_k u_k' prod_{j!=k} (kappa_j + z). P is monic of degree n with real roots xi_k.
  auto product_except = [&](int skip, int skip2, Ext z) {
    Ext p = Ext(1);
    for (int j = 0; j < n; ++j) {
      if (j != skip && j != skip2) p *= s[j].kappa + z;
    }
    return p;
  };
  auto P = [&](Ext z) {
    Ext v = product_except(-1, -1, z);
    for (int k = 0; k < n; ++k) v += je.u[k] * product_except(k, -1, z);
    return v;
  };
  auto dP = [&](Ext z) {
    Ext v = Ext(0);
    for (int i = 0; i < n; ++i) {
      v += product_except(i, -1, z);
      for (int k = 0; k < n; ++k) {
        if (k != i) v += je.u[k] * product_except(k, i, z);
      }
    }
    return v;
  };
  auto N = [&](Ext z) {
    Ext v = Ext(0);
    for (int k = 0; k < n; ++k) v += je.du[k] * product_except(k, -1, z);
    return v;
  };

  Polynomial poly({1.0});
  for (const auto& sk : s) poly = poly * Polynomial({sk.kappa, 1.0});
  for (int k = 0; k < n; ++k) {
    Polynomial term({jc.u[k]});
    for (int j = 0; j < n; ++j) {
      if (j != k) term = term * Polynomial({s[j].kappa, 1.0});
    }
    poly = poly + term;
  }

  const double kmax = s.back().kappa;
  std::vector<WeylPole> poles;
  for (auto r : polynomial_roots(poly)) {
    if (std::abs(r.imag()) > 1e-6 * std::max(1.0, kmax)) {
      throw Error(ErrorCode::glue_mismatch, "Weyl function has a non-real pole " + fmt(r.real()) +
                                                " + " + fmt(r.imag()) + "i");
    }
    Ext xi = r.real();
    for (int it = 0; it < 60; ++it) {
      const Ext d = dP(xi);
      if (d == Ext(0)) break;
      const Ext step = P(xi) / d;
      xi -= step;
      if (xabs(step) <= Ext(1e-30) * std::max(Ext(1), xabs(xi))) break;
    }
    poles.push_back({static_cast<double>(xi), static_cast<double>(N(xi) / dP(xi))});
  }
  DiscreteWeylFunction mw(std::move(poles));

  // Glue check: partial fractions against the closed forms in both half-planes.
  const double radius = 2.0 * (kmax + 1.0);
  for (double theta : {0.3, 1.1, 2.0, -0.4, -1.3, -2.6}) {
    const std::complex<double> rho = std::polar(radius, theta);
    const auto closed = weyl_closed_form(data, jc, rho, theta > 0);
    const auto pf = mw(rho);
    if (std::abs(closed - pf) > 1e-8 * std::max(1.0, std::abs(closed))) {
      throw Error(ErrorCode::glue_mismatch, "partial fractions disagree with the Jost form at rho = " +
                                                fmt(rho.real()) + (rho.imag() < 0 ? "" : "+") +
                                                fmt(rho.imag()) + "i");
    }
  }
  return mw;
}

}  // namespace

DiscreteWeylFunction weyl_function(const SolitonData& data) {
  if (data.empty()) return DiscreteWeylFunction();
  return weyl_function_direct(data);
}

std::vector<double> SpectralClassification::all() const {
  std::vector<double> out = lambda1;
  out.insert(out.end(), lambda2.begin(), lambda2.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct PoleGroup {
  double abs_xi = 0.0;
  double weight = 0.0;
  bool paired = false;
};

std::vector<PoleGroup> group_poles(const DiscreteWeylFunction& mw, double tol) {
  std::vector<WeylPole> sorted = mw.poles();
  std::sort(sorted.begin(), sorted.end(),
            [](const WeylPole& a, const WeylPole& b) { return std::abs(a.xi) < std::abs(b.xi); });
  std::vector<PoleGroup> groups;
  for (const auto& p : sorted) {
    const double a = std::abs(p.xi);
    if (!groups.empty() && !groups.back().paired && near(groups.back().abs_xi, a, tol) && a > tol) {
      auto& g = groups.back();
      g.abs_xi = 0.5 * (g.abs_xi + a);
      g.weight += p.weight;
      g.paired = true;
    } else {
      groups.push_back({a, p.weight, false});
    }
  }
  return groups;
}

bool is_paired_location(const std::vector<PoleGroup>& groups, double xi, double tol) {
  for (const auto& g : groups) {
    if (g.paired && near(g.abs_xi, std::abs(xi), tol)) return true;
  }
  return false;
}

}  // namespace

SpectralClassification classify(const DiscreteWeylFunction& mw, const ClassifyOptions& opt) {
  SpectralClassification out;
  if (mw.size() == 0) return out;
  const auto groups = group_poles(mw, opt.pair_tol);

  for (const auto& g : groups) {
    if (g.paired) out.lambda2.push_back(g.abs_xi);
  }
  for (const auto& p : mw.poles()) {
    if (!is_paired_location(groups, p.xi, opt.pair_tol)) out.lambda0_1.push_back(p.xi);
  }

  // Nonzero roots of m(rho) = m(-rho) at rho = i kappa: F(lambda) = sum W/(lambda - |xi|^2) = 1,
  // exactly one root between consecutive distinct |xi|^2 and one above the largest.
  auto F = [&](double lam) {
    double v = -1.0;
    for (const auto& g : groups) v += g.weight / (lam - g.abs_xi * g.abs_xi);
    return v;
  };
  auto dF = [&](double lam) {
    double v = 0.0;
    for (const auto& g : groups) {
      const double d = lam - g.abs_xi * g.abs_xi;
      v -= g.weight / (d * d);
    }
    return v;
  };
  std::vector<double> ends;
  for (const auto& g : groups) ends.push_back(g.abs_xi * g.abs_xi);
  // the top root is at most max |xi|^2 + W, with equality for a single group
  ends.push_back(2.0 * (ends.back() + mw.total_weight()) + 1.0);
  for (size_t i = 0; i + 1 < ends.size(); ++i) {
    const double inf = std::numeric_limits<double>::infinity();
    const double lo = std::nextafter(ends[i], inf);
    const double hi = (i + 2 == ends.size()) ? ends[i + 1] : std::nextafter(ends[i + 1], -inf);
    double lam;
    try {
      lam = bracketed_root(F, dF, lo, hi, RootOptions{1e-6, 1e-15, 600});
    } catch (const std::domain_error&) {
      throw Error(ErrorCode::root_count_mismatch,
                  "no eigenvalue between |xi|^2 = " + fmt(ends[i]) + " and " + fmt(ends[i + 1]));
    }
    if (!(lam > 0.0)) {
      throw Error(ErrorCode::root_count_mismatch, "nonpositive root lambda = " + fmt(lam));
    }
    out.lambda1.push_back(std::sqrt(lam));
  }
  std::sort(out.lambda1.begin(), out.lambda1.end());

  if (static_cast<int>(out.lambda1.size() + out.lambda2.size()) != mw.size()) {
    throw Error(ErrorCode::root_count_mismatch,
                "found " + std::to_string(out.lambda1.size() + out.lambda2.size()) +
                    " eigenvalues for " + std::to_string(mw.size()) + " poles");
  }
  return out;
}

std::vector<NormingConstant> alphas(const DiscreteWeylFunction& mw, const SpectralClassification& cls,
                                    const ClassifyOptions& opt) {
  auto product = [&](double kappa) {
    double p = 1.0;
    for (double xi : cls.lambda0_1) {
      const double den = kappa - xi;
      if (std::abs(den) <= 1e-14 * std::max(1.0, kappa)) {
        throw Error(ErrorCode::division_by_zero,
                    "eigenvalue " + fmt(kappa) + " coincides with an unpaired pole");
      }
      p *= (kappa + xi) / den;
    }
    return p;
  };
  auto weight_at = [&](double xi) {
    const WeylPole* best = nullptr;
    for (const auto& p : mw.poles()) {
      if (best == nullptr || std::abs(p.xi - xi) < std::abs(best->xi - xi)) best = &p;
    }
    if (best == nullptr || !near(best->xi, xi, opt.pair_tol)) {
      throw Error(ErrorCode::classification_failure, "no pole at xi = " + fmt(xi));
    }
    return best->weight;
  };

  std::vector<NormingConstant> out;
  for (double k : cls.lambda1) out.push_back({k, product(k)});
  for (double k : cls.lambda2) out.push_back({k, -weight_at(-k) / weight_at(k) * product(k)});
  std::sort(out.begin(), out.end(),
            [](const NormingConstant& a, const NormingConstant& b) { return a.kappa < b.kappa; });
  return out;
}

SolitonData from_alphas(const std::vector<NormingConstant>& alpha, bool check_roundtrip) {
  std::vector<NormingConstant> sorted = alpha;
  std::sort(sorted.begin(), sorted.end(),
            [](const NormingConstant& a, const NormingConstant& b) { return a.kappa < b.kappa; });
  std::vector<Soliton> sol;
  for (size_t k = 0; k < sorted.size(); ++k) {
    const double kk = sorted[k].kappa;
    if (!(kk > 0.0)) throw Error(ErrorCode::config_invalid, "eigenvalue parameter must be positive");
    if (k > 0 && !(kk > sorted[k - 1].kappa)) {
      throw Error(ErrorCode::config_invalid, "eigenvalue parameters must be distinct");
    }
    double pi = 1.0;
    for (size_t j = 0; j < sorted.size(); ++j) {
      if (j != k) pi *= (kk - sorted[j].kappa) / (kk + sorted[j].kappa);
    }
    const double g = 2.0 * kk * sorted[k].alpha / pi;
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw Error(ErrorCode::inadmissible_sign,
                  "alpha(" + fmt(kk) + ") = " + fmt(sorted[k].alpha) + " has the wrong sign (expected " +
                      (pi > 0 ? "positive" : "negative") + ")");
    }
    sol.push_back({kk, g});
  }
  SolitonData data(std::move(sol));

  if (check_roundtrip && !data.empty()) {
    const auto mw = weyl_function(data);
    const auto back = alphas(mw, classify(mw));
    bool ok = back.size() == sorted.size();
    for (size_t k = 0; ok && k < back.size(); ++k) {
      ok = std::abs(back[k].kappa - sorted[k].kappa) <= 1e-8 * sorted[k].kappa &&
           std::abs(back[k].alpha - sorted[k].alpha) <= 1e-8 * std::abs(sorted[k].alpha);
    }
    if (!ok) throw Error(ErrorCode::roundtrip_failure, "normalizing constants do not survive the roundtrip");
  }
  return data;
}

}  // namespace kdvbvp
