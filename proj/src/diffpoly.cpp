#include "kdvbvp/diffpoly.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "kdvbvp/error.hpp"

namespace kdvbvp {

namespace {

std::vector<int> dense_exponents(const PowerMap& powers, int length) {
  std::vector<int> out(static_cast<size_t>(length), 0);
  for (auto [k, e] : powers) out[static_cast<size_t>(k)] = e;
  return out;
}

// Graded lexicographic: differential order first, then the exponent vector.
bool monomial_less(const DiffMonomial& a, const DiffMonomial& b) {
  int oa = a.differential_order();
  int ob = b.differential_order();
  if (oa != ob) return oa < ob;
  int len = std::max(a.max_derivative(), b.max_derivative()) + 1;
  auto ea = dense_exponents(a.powers, len);
  auto eb = dense_exponents(b.powers, len);
  return ea < eb;
}

std::string render_rational(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) os << "/" << boost::multiprecision::denominator(r);
  return os.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

int DiffMonomial::differential_order() const {
  int total = 0;
  for (auto [k, e] : powers) total += k * e;
  return total;
}

int DiffMonomial::max_derivative() const { return powers.empty() ? -1 : powers.rbegin()->first; }

DiffPoly::DiffPoly(const Rational& c) {
  if (c != 0) terms_.push_back({c, {}});
}

DiffPoly DiffPoly::var(int k) { return monomial(Rational(1), PowerMap{{k, 1}}); }

DiffPoly DiffPoly::monomial(const Rational& c, PowerMap powers) {
  DiffPoly p;
  for (auto it = powers.begin(); it != powers.end();) {
    it = it->second == 0 ? powers.erase(it) : std::next(it);
  }
  if (c != 0) p.terms_.push_back({c, std::move(powers)});
  return p;
}

int DiffPoly::max_derivative() const {
  int m = -1;
  for (const auto& t : terms_) m = std::max(m, t.max_derivative());
  return m;
}

void DiffPoly::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), monomial_less);
  std::vector<DiffMonomial> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().powers == t.powers) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const DiffMonomial& m) { return m.coeff == 0; });
  terms_ = std::move(merged);
}

DiffPoly DiffPoly::operator-() const {
  DiffPoly r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly r;
  r.terms_ = a.terms_;
  r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
  r.canonicalize();
  return r;
}

DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) { return a + (-b); }

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly r;
  r.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      DiffMonomial m{x.coeff * y.coeff, x.powers};
      for (auto [k, e] : y.powers) m.powers[k] += e;
      r.terms_.push_back(std::move(m));
    }
  }
  r.canonicalize();
  return r;
}

bool operator==(const DiffPoly& a, const DiffPoly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (size_t i = 0; i < a.terms_.size(); ++i) {
    if (a.terms_[i].coeff != b.terms_[i].coeff || a.terms_[i].powers != b.terms_[i].powers) {
      return false;
    }
  }
  return true;
}

std::string DiffPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    std::string factors;
    for (auto [k, e] : t.powers) {
      if (!factors.empty()) factors += "*";
      factors += "q" + std::to_string(k);
      if (e != 1) factors += "^" + std::to_string(e);
    }
    const bool integral = boost::multiprecision::denominator(t.coeff) == 1;
    if (factors.empty()) {
      os << (integral && t.coeff > 0 ? render_rational(t.coeff) : "(" + render_rational(t.coeff) + ")");
    } else if (t.coeff == 1) {
      os << factors;
    } else if (integral && t.coeff > 0) {
      os << render_rational(t.coeff) << "*" << factors;
    } else {
      os << "(" << render_rational(t.coeff) << ")*" << factors;
    }
  }
  return os.str();
}

DiffPoly ddx(const DiffPoly& p) {
  DiffPoly out;
  for (const auto& t : p.monomials()) {
    for (auto [k, e] : t.powers) {
      PowerMap powers = t.powers;
      if (--powers[k] == 0) powers.erase(k);
      powers[k + 1] += 1;
      out += DiffPoly::monomial(t.coeff * e, std::move(powers));
    }
  }
  return out;
}

DiffPoly antiderivative(const DiffPoly& p) {
  // Peel off the monomial with the highest derivative q^{(k)}: in a total
  // derivative it appears linearly as c*q^{(k)}*q^{(k-1)e}*R with R of lower
  // order, whose integral has leading part c/(e+1) q^{(k-1)(e+1)} R.
  DiffPoly rest = p;
  DiffPoly result;
  while (!rest.is_zero()) {
    const DiffMonomial* top = nullptr;
    for (const auto& t : rest.monomials()) {
      if (top == nullptr || t.max_derivative() > top->max_derivative()) top = &t;
    }
    const int k = top->max_derivative();
    if (k < 1 || top->powers.at(k) != 1) {
      throw Error(ErrorCode::antiderivative_not_exact,
                  "not a total x-derivative: " + p.to_string());
    }
    PowerMap powers = top->powers;
    powers.erase(k);
    const int e = powers.count(k - 1) ? powers.at(k - 1) : 0;
    powers[k - 1] = e + 1;
    DiffPoly piece = DiffPoly::monomial(top->coeff / (e + 1), std::move(powers));
    result += piece;
    rest -= ddx(piece);
  }
  return result;
}

DiffPoly apply_H(const DiffPoly& p) {
  const DiffPoly q = DiffPoly::var(0);
  const DiffPoly q1 = DiffPoly::var(1);
  const DiffPoly p1 = ddx(p);
  const DiffPoly p3 = ddx(ddx(p1));
  return DiffPoly(Rational(-1, 2)) * p3 + DiffPoly(2) * q * p1 + q1 * p;
}

namespace {

struct HierarchyCache {
  std::mutex mutex;
  std::vector<DiffPoly> potentials{DiffPoly(), DiffPoly(Rational(-1, 2)) * DiffPoly::var(0)};
  std::vector<DiffPoly> betas{DiffPoly(), DiffPoly::var(0)};
};

HierarchyCache& cache() {
  static HierarchyCache c;
  return c;
}

void check_cap(const char* what, int value, int cap) {
  if (value > cap) {
    throw Error(ErrorCode::cap_exceeded, std::string(what) + " = " + std::to_string(value) +
                                             " exceeds the configured limit " + std::to_string(cap));
  }
}

}  // namespace

DiffPoly kdv_potential(int nu, const FlowLimits& limits) {
  if (nu < 1) throw Error(ErrorCode::config_invalid, "kdv_potential needs nu >= 1");
  check_cap("nu", nu - 1, limits.max_nu);
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  while (static_cast<int>(c.potentials.size()) <= nu) {
    c.potentials.push_back(antiderivative(apply_H(c.potentials.back())));
  }
  return c.potentials[static_cast<size_t>(nu)];
}

DiffPoly kdv_flow(int nu, const FlowLimits& limits) {
  if (nu < 0) throw Error(ErrorCode::config_invalid, "kdv_flow needs nu >= 0");
  check_cap("nu", nu, limits.max_nu);
  if (nu == 0) return -ddx(kdv_potential(1, limits));
  return -apply_H(kdv_potential(nu, limits));
}

DiffPoly beta_poly(int n, const FlowLimits& limits) {
  if (n < 1) throw Error(ErrorCode::config_invalid, "beta_poly needs n >= 1");
  check_cap("n", n, limits.max_beta);
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  while (static_cast<int>(c.betas.size()) <= n) {
    const int m = static_cast<int>(c.betas.size()) - 1;
    DiffPoly next = -ddx(c.betas[static_cast<size_t>(m)]);
    for (int v = 1; v <= m - 1; ++v) {
      next -= c.betas[static_cast<size_t>(v)] * c.betas[static_cast<size_t>(m - v)];
    }
    c.betas.push_back(std::move(next));
  }
  return c.betas[static_cast<size_t>(n)];
}

double eval_jet(const DiffPoly& p, const Jet& jet) {
  if (p.max_derivative() > jet.order()) {
    throw Error(ErrorCode::jet_too_short, "jet of order " + std::to_string(jet.order()) +
                                              " cannot evaluate a polynomial of order " +
                                              std::to_string(p.max_derivative()));
  }
  double sum = 0.0;
  for (const auto& t : p.monomials()) {
    double term = to_double(t.coeff);
    for (auto [k, e] : t.powers) term *= std::pow(jet[k], e);
    sum += term;
  }
  return sum;
}

double b_n_eval(int n, const Jet& jet, const FlowLimits& limits) {
  if (jet.order() < n - 1) {
    throw Error(ErrorCode::jet_too_short, "b_" + std::to_string(n) + " needs a jet of order " +
                                              std::to_string(n - 1));
  }
  return std::ldexp(eval_jet(beta_poly(n, limits), jet), -n);
}

}  // namespace kdvbvp
