#include <cmath>

#include "doctest.h"
#include "kdvbvp/error.hpp"
#include "kdvbvp/verify.hpp"

using namespace kdvbvp;

namespace {

SolutionField desk_field(int n_seed) {
  auto setup = SpectralSetup::create({{8.0, 4.0}}, -1.0);
  const SolitonData seed = n_seed == 0 ? SolitonData() : SolitonData({{0.6, 1.0}});
  const auto [lo, hi] = seed_bracket(seed, 1.0, 0.0);
  const auto cfg = ProblemConfig::create(std::move(setup), -0.5, seed, 0.5 * (lo + hi));
  std::vector<double> t, x;
  for (int i = -2; i <= 2; ++i) t.push_back(0.3 + 1e-3 * i);
  for (int j = 0; j <= 40; ++j) x.push_back(-5.0 + 0.25 * j);
  return solve(cfg, t, x);
}

// Field with one slice per t, all jets equal to `jet`.
SolutionField constant_field(std::vector<double> C, const Jet& jet, int nt = 5) {
  SolutionField f;
  f.C = std::move(C);
  f.a.assign(f.C.size(), 0.0);
  for (int i = 0; i < nt; ++i) f.t_grid.push_back(0.1 * i);
  f.x_grid = {-1.0, 0.0, 1.0};
  for (double t : f.t_grid) {
    SolutionSlice sl;
    sl.t = t;
    sl.jets.assign(3, jet);
    sl.origin = jet;
    f.slices.push_back(sl);
  }
  return f;
}

}  // namespace

TEST_SUITE("verify") {

TEST_CASE("desk fields pass every check") {
  for (int n : {0, 1}) {
    const auto f = desk_field(n);
    const auto rep = verify(f);
    CHECK(rep.passed());
    CHECK(rep.residual_sup <= 1e-6);
    CHECK(rep.boundary_max_err <= 1e-8);
    CHECK(rep.laurent_max_err <= 1e-8);
    CHECK(rep.remark42_max_err <= 1e-7);
    CHECK(rep.bracket_ok);
    CHECK(rep.pole_count_ok);
  }
}

TEST_CASE("constant field with C = 0 has zero residual") {
  const auto f = constant_field({0.0, 0.0}, Jet({0.3, -0.2, 0.1, 0.5, 0.0, 0.0}));
  const auto r = pde_residual(f, f.C);
  CHECK(r.absolute == 0.0);
  CHECK(r.normalized == 0.0);
}

TEST_CASE("residual stencil preconditions") {
  const Jet j({0.0, 0.0, 0.0, 0.0});
  auto f = constant_field({8.0, 4.0}, j, 4);
  CHECK_THROWS_AS(pde_residual(f, f.C), Error);
  f = constant_field({8.0, 4.0}, j, 6);
  f.t_grid[3] += 0.01;
  try {
    pde_residual(f, f.C);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::grid_too_coarse);
  }
  const auto short_jet = constant_field({8.0, 4.0}, Jet({0.0, 0.0}));
  try {
    pde_residual(short_jet, short_jet.C);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::jet_too_short);
  }
  // a coarse grid is reported, not fatal
  const auto coarse = constant_field({8.0, 4.0}, Jet({0.0, 0.0, 0.0, 0.0, 0.0, 0.0}), 3);
  const auto rep = verify(coarse);
  CHECK(rep.details.front().note.find("skipped") != std::string::npos);
}

TEST_CASE("boundary functionals for s = 1 and s = 2") {
  // s = 1: 1/2 q(0) = a1, 1/8 (q'' - q^2)(0) = a2
  const Jet j({0.6, 0.2, 1.0, 0.0, 0.0, 0.0});
  auto f = constant_field({8.0, 4.0}, j);
  f.a = {0.3, (1.0 - 0.36) / 8.0};
  CHECK(boundary_residual(f, f.a).value == doctest::Approx(0.0).epsilon(1e-15));
  f.a[1] += 1e-3;
  CHECK(boundary_residual(f, f.a).value == doctest::Approx(1e-3));
  CHECK(boundary_residual(f, f.a).where == "b3 - a2");

  // s = 2 adds b2 = -q'(0)/4 = 0
  auto g = constant_field({128.0, 80.0, 8.0}, j);
  g.a = {0.3, (1.0 - 0.36) / 8.0, b_n_eval(5, j)};
  const auto r = boundary_residual(g, g.a);
  CHECK(r.value == doctest::Approx(0.05));
  CHECK(r.where == "b2");

  const auto zero = constant_field({8.0, 4.0}, Jet(std::vector<double>(6, 0.0)));
  CHECK(boundary_residual(zero, zero.a).value == 0.0);

  auto short_origin = constant_field({8.0, 4.0}, Jet({0.0, 0.0}));
  CHECK_THROWS_AS(boundary_residual(short_origin, short_origin.a), Error);
}

TEST_CASE("Laurent cross-check") {
  // q(0) = -2 sum w; zero measure with zero jet gives zero.
  auto f = constant_field({8.0, 4.0}, Jet(std::vector<double>(6, 0.0)));
  CHECK(laurent_crosscheck(f, 6).value == 0.0);
  for (auto& sl : f.slices) {
    sl.measure = DiscreteWeylFunction({{0.0, 0.75}});
    sl.origin = Jet({-1.5, 0.0, 0.0, 0.0, 0.0, 0.0});
  }
  CHECK(laurent_crosscheck(f, 1).value == doctest::Approx(0.0));
  CHECK(laurent_crosscheck(f, 3).value > 0.0);
}

TEST_CASE("w matches the signed b_2s functional at the origin") {
  const auto f = desk_field(1);
  CHECK(remark42_check(f).value <= 1e-7);
  // at t = 0 w equals the configured w0
  auto g = desk_field(0);
  CHECK(remark42_check(g).value <= 1e-7);
}

TEST_CASE("mutation: each check fails on a 1% perturbation") {
  const auto base = desk_field(1);
  REQUIRE(verify(base).passed());

  auto find = [](const VerificationReport& r, const std::string& name) {
    for (const auto& d : r.details) {
      if (d.check == name) return d;
    }
    FAIL("missing check " << name);
    return CheckDetail{};
  };

  SUBCASE("q scaled at one t") {
    auto f = base;
    for (auto& j : f.slices[2].jets) {
      for (auto& v : j.mutable_values()) v *= 1.01;
    }
    const auto rep = verify(f);
    CHECK(rep.residual_sup > 1e-2);
    CHECK_FALSE(find(rep, "pde_residual").passed);
  }
  SUBCASE("origin jet") {
    auto f = base;
    for (auto& v : f.slices[1].origin.mutable_values()) v *= 1.01;
    const auto rep = verify(f);
    CHECK_FALSE(find(rep, "boundary").passed);
    CHECK_FALSE(find(rep, "laurent").passed);
  }
  SUBCASE("measure weights") {
    auto f = base;
    auto poles = f.slices[3].measure.poles();
    for (auto& p : poles) p.weight *= 1.01;
    f.slices[3].measure = DiscreteWeylFunction(poles);
    CHECK_FALSE(find(verify(f), "laurent").passed);
  }
  SUBCASE("w column") {
    auto f = base;
    f.slices[0].w.w *= 1.01;
    CHECK_FALSE(find(verify(f), "remark42").passed);
  }
  SUBCASE("w pushed 1% of the bracket width past M(T, -i kappa)") {
    auto f = base;
    auto& w = f.slices[4].w;
    w.w = w.upper + 0.01 * (w.upper - w.lower);
    CHECK_FALSE(find(verify(f), "bracket").passed);
  }
  SUBCASE("a pole dropped") {
    auto f = base;
    auto poles = f.slices[2].measure.poles();
    poles.pop_back();
    f.slices[2].measure = DiscreteWeylFunction(poles);
    CHECK_FALSE(find(verify(f), "pole_count").passed);
  }
}

TEST_CASE("report JSON has fixed names and is reproducible") {
  const auto f = desk_field(0);
  const auto a = verify(f).to_json();
  const auto b = verify(f).to_json();
  CHECK(a.dump() == b.dump());
  for (const char* k : {"residual_sup", "boundary_max_err", "laurent_max_err", "remark42_max_err", "bracket_ok",
                        "pole_count_ok", "details"}) {
    CHECK(a.contains(k));
  }
  CHECK(a["details"].size() == 6);
}

}  // TEST_SUITE
