#include <random>

#include "doctest.h"
#include "kdvbvp/diffpoly.hpp"
#include "kdvbvp/error.hpp"

using namespace kdvbvp;

namespace {

DiffPoly q(int k) { return DiffPoly::var(k); }
DiffPoly r(long n, long d) { return DiffPoly(Rational(n, d)); }

DiffPoly random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nterms(1, 4), ord(0, 3), expo(1, 2), num(-5, 5), den(1, 4);
  DiffPoly p;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    PowerMap pm;
    const int factors = nterms(rng) - 1;
    for (int f = 0; f < factors; ++f) pm[ord(rng)] += expo(rng);
    int c = num(rng);
    if (c == 0) c = 1;
    p += DiffPoly::monomial(Rational(c, den(rng)), pm);
  }
  return p;
}

Jet random_jet(std::mt19937_64& rng, int order) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<double> v(static_cast<size_t>(order) + 1);
  for (auto& x : v) x = u(rng);
  return Jet(v);
}

}  // namespace

TEST_SUITE("diffpoly") {

TEST_CASE("ddx follows the Leibniz rule") {
  CHECK(ddx(q(0) * q(0)) == r(2, 1) * q(0) * q(1));
  CHECK(ddx(q(2) - q(0) * q(0)) == q(3) - r(2, 1) * q(0) * q(1));
  CHECK(ddx(DiffPoly()).is_zero());
  CHECK(ddx(DiffPoly(7)).is_zero());
}

TEST_CASE("ddx agrees with a finite difference along a polynomial path") {
  // q(x) = sum c_k x^k / k! has jet c at x = 0 and shifted jets elsewhere.
  std::mt19937_64 rng(11);
  const std::vector<double> c = {0.3, -0.7, 1.1, 0.4, -0.2, 0.9, 0.05, -0.3};
  auto jet_at = [&](double x) {
    std::vector<double> v(c.size(), 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      double s = 0.0, f = 1.0;
      for (size_t j = k; j < c.size(); ++j) {
        s += c[j] * std::pow(x, static_cast<double>(j - k)) / f;
        f *= static_cast<double>(j - k + 1);
      }
      v[k] = s;
    }
    return Jet(v);
  };
  for (int trial = 0; trial < 5; ++trial) {
    const DiffPoly p = random_poly(rng);
    const double h = 1e-3;
    const double fd = (-eval_jet(p, jet_at(2 * h)) + 8 * eval_jet(p, jet_at(h)) - 8 * eval_jet(p, jet_at(-h)) +
                       eval_jet(p, jet_at(-2 * h))) /
                      (12 * h);
    CHECK(eval_jet(ddx(p), jet_at(0.0)) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("apply_H examples") {
  CHECK(apply_H(r(-1, 2) * q(0)) == r(1, 4) * q(3) - r(3, 2) * q(0) * q(1));
  CHECK(apply_H(DiffPoly()).is_zero());
  CHECK(apply_H(DiffPoly(1)) == q(1));
}

TEST_CASE("flows match the printed s = 1 and s = 2 equations") {
  CHECK(kdv_flow(0) == r(1, 2) * q(1));
  CHECK(kdv_flow(1) == r(1, 4) * (r(6, 1) * q(0) * q(1) - q(3)));
  CHECK(kdv_flow(2) == r(1, 8) * (q(5) - r(10, 1) * q(0) * q(3) - r(20, 1) * q(1) * q(2) +
                                  r(30, 1) * q(0) * q(0) * q(1)));
}

TEST_CASE("stored antiderivatives satisfy P'_{nu+1} = H P_nu") {
  for (int nu = 1; nu <= 3; ++nu) CHECK(ddx(kdv_potential(nu + 1)) == apply_H(kdv_potential(nu)));
  CHECK(kdv_potential(1) == r(-1, 2) * q(0));
}

TEST_CASE("antiderivative rejects non-exact input") {
  CHECK_THROWS_AS(antiderivative(q(0) * q(0)), Error);
  try {
    antiderivative(q(1) * q(1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::antiderivative_not_exact);
  }
  const DiffPoly p = q(0) * q(0) * q(2) + q(3);
  CHECK(antiderivative(ddx(p)) == p);
}

TEST_CASE("flow and beta caps") {
  CHECK_THROWS_AS(kdv_flow(7), Error);
  try {
    kdv_flow(7);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cap_exceeded);
  }
  FlowLimits lim;
  lim.max_nu = 8;
  CHECK_NOTHROW(kdv_flow(7, lim));
  CHECK_THROWS_AS(beta_poly(13), Error);
}

TEST_CASE("beta polynomials") {
  CHECK(beta_poly(1) == q(0));
  CHECK(beta_poly(2) == -q(1));
  CHECK(beta_poly(3) == q(2) - q(0) * q(0));
  CHECK(beta_poly(5) == q(4) - r(6, 1) * q(0) * q(2) - r(5, 1) * q(1) * q(1) + r(2, 1) * q(0) * q(0) * q(0));
}

TEST_CASE("b_n evaluation") {
  CHECK(b_n_eval(1, Jet({0.0})) == 0.0);
  CHECK(b_n_eval(1, Jet({3.0})) == doctest::Approx(1.5));
  CHECK(b_n_eval(2, Jet({0.4, 2.0})) == doctest::Approx(-0.5));
  CHECK(b_n_eval(3, Jet({2.0, 0.0, 4.0})) == doctest::Approx(0.0));
  CHECK(b_n_eval(3, Jet({1.0, 0.0, 5.0})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(b_n_eval(3, Jet({1.0, 2.0})), Error);
}

TEST_CASE("eval_jet examples") {
  CHECK(eval_jet(q(0) * q(0), Jet({3.0})) == 9.0);
  CHECK(eval_jet(kdv_flow(1), Jet({1.0, 2.0, 0.0, 4.0})) == doctest::Approx(2.0));
  CHECK(eval_jet(DiffPoly(), Jet({5.0})) == 0.0);
  try {
    eval_jet(q(3), Jet({1.0, 2.0}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::jet_too_short);
  }
}

TEST_CASE("ring axioms on random triples") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const DiffPoly p = random_poly(rng), s = random_poly(rng), w = random_poly(rng);
    CHECK((p + s) * w == p * w + s * w);
    CHECK(ddx(p * s) == ddx(p) * s + p * ddx(s));
    CHECK(p + s == s + p);
    CHECK((p - p).is_zero());
  }
}

TEST_CASE("evaluation commutes with multiplication") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const DiffPoly p = random_poly(rng), s = random_poly(rng);
    const Jet j = random_jet(rng, 4);
    const double lhs = eval_jet(p * s, j);
    const double rhs = eval_jet(p, j) * eval_jet(s, j);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("canonical rendering") {
  CHECK(kdv_flow(0).to_string() == "(1/2)*q1");
  CHECK(kdv_flow(1).to_string() == "(3/2)*q0*q1 + (-1/4)*q3");
  CHECK(beta_poly(1).to_string() == "q0");
  CHECK(DiffPoly().to_string() == "0");
  // order independence of construction
  CHECK((q(3) + q(0) * q(1)).to_string() == (q(1) * q(0) + q(3)).to_string());
}

}  // TEST_SUITE
