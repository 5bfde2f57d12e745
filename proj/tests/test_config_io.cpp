#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kdvbvp/config.hpp"
#include "kdvbvp/error.hpp"

using namespace kdvbvp;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

json desk() {
  return json::parse(R"({"C": [8, 4], "mu_star": -1, "mu_lower": -0.5,
    "solitons": [{"kappa": 0.6, "g": 1.0}], "w0": {"fraction": 0.5},
    "t_grid": {"start": -0.002, "stop": 0.002, "steps": 4},
    "x_grid": {"start": -2, "stop": 2, "steps": 8}})");
}

ErrorCode parse_code(const json& j) {
  try {
    parse_run_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::grid_too_coarse;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(KDVBVP_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("grid spec counts intervals") {
  GridSpec g{-1.0, 1.0, 4};
  const auto p = g.points();
  REQUIRE(p.size() == 5);
  CHECK(p.front() == -1.0);
  CHECK(p.back() == 1.0);
  CHECK(p[2] == 0.0);
  CHECK(GridSpec{0.5, 0.5, 0}.points() == std::vector<double>{0.5});
}

TEST_CASE("parse a complete config") {
  const RunConfig r = parse_run_config(desk());
  CHECK(r.C == std::vector<double>{8.0, 4.0});
  CHECK(r.mu_star == -1.0);
  CHECK(*r.mu_lower == -0.5);
  CHECK(r.solitons.size() == 1);
  CHECK(r.w0.is_fraction);
  CHECK(r.t_grid.steps == 4);
  CHECK(r.output_dir == "out");
  const ProblemConfig cfg = make_problem(r);
  const auto [lo, hi] = seed_bracket(cfg.seed(), 1.0, 0.0);
  CHECK(cfg.w0() == doctest::Approx(0.5 * (lo + hi)));
}

TEST_CASE("defaults and overrides") {
  json j = desk();
  j.erase("mu_lower");
  j["w0"] = 0.1;
  j["tolerances"] = {{"residual", 1e-4}};
  const RunConfig r = parse_run_config(j);
  CHECK_FALSE(r.mu_lower.has_value());
  CHECK_FALSE(r.w0.is_fraction);
  CHECK(r.tolerances.residual == 1e-4);
  CHECK(r.tolerances.boundary == 1e-8);
  CHECK(make_problem(r).mu_lower() == -0.5);
}

TEST_CASE("schema errors name the field") {
  json j = desk();
  j.erase("C");
  CHECK(parse_code(j) == ErrorCode::config_invalid);
  j = desk();
  j["C"] = {8};
  CHECK(parse_code(j) == ErrorCode::config_invalid);
  j = desk();
  j["mu_star"] = "x";
  CHECK(parse_code(j) == ErrorCode::config_invalid);
  j = desk();
  j["w0"] = {{"fraction", 1.5}};
  CHECK(parse_code(j) == ErrorCode::config_invalid);
  j = desk();
  j["t_grid"]["steps"] = -1;
  CHECK(parse_code(j) == ErrorCode::config_invalid);
  j = desk();
  j["solitons"] = {{{"kappa", 0.6}}};
  CHECK(parse_code(j) == ErrorCode::config_invalid);
  CHECK(parse_code(json::array()) == ErrorCode::config_invalid);
  try {
    j = desk();
    j.erase("mu_star");
    parse_run_config(j);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("mu_star") != std::string::npos);
  }
}

TEST_CASE("load_run_config failures") {
  const fs::path dir = scratch("load");
  CHECK_THROWS_AS(load_run_config((dir / "missing.json").string()), Error);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_run_config((dir / "bad.json").string()), Error);
  std::ofstream(dir / "empty.json");
  CHECK_THROWS_AS(load_run_config((dir / "empty.json").string()), Error);
}

TEST_CASE("soliton JSON roundtrip") {
  const SolitonData d({{0.3, 2.5}, {0.7, 0.125}});
  const SolitonData back = soliton_data_from_json(soliton_data_to_json(d));
  REQUIRE(back.size() == 2);
  CHECK(back.solitons()[1].kappa == 0.7);
  CHECK(back.solitons()[1].g == 0.125);
}

TEST_CASE("field write/read roundtrip is exact") {
  const RunConfig r = parse_run_config(desk());
  const ProblemConfig cfg = make_problem(r);
  const SolutionField f = solve(cfg, r.t_grid.points(), r.x_grid.points());
  const fs::path dir = scratch("field");
  write_field(f, dir.string());
  const SolutionField g = read_field(dir.string());
  CHECK(g.C == f.C);
  CHECK(g.a == f.a);
  CHECK(g.t_grid == f.t_grid);
  CHECK(g.x_grid == f.x_grid);
  CHECK(g.expected_pole_count == f.expected_pole_count);
  for (size_t i = 0; i < f.slices.size(); ++i) {
    CHECK(g.slices[i].w.w == f.slices[i].w.w);
    CHECK(g.slices[i].measure.size() == f.slices[i].measure.size());
    for (size_t j = 0; j < f.x_grid.size(); ++j) {
      const auto a = f.slices[i].jets[j].values();
      const auto b = g.slices[i].jets[j].values();
      CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
  }
  CHECK(verify(g).to_json().dump() == verify(f).to_json().dump());
}

TEST_CASE("read_field rejects damaged data") {
  const RunConfig r = parse_run_config(desk());
  const SolutionField f = solve(make_problem(r), r.t_grid.points(), r.x_grid.points());
  auto damaged = [&](const std::string& file, const std::string& content) {
    const fs::path dir = scratch("damaged");
    write_field(f, dir.string());
    std::ofstream(dir / file, std::ios::trunc) << content;
    try {
      read_field(dir.string());
    } catch (const Error& e) {
      return e.code() == ErrorCode::config_invalid;
    }
    return false;
  };
  CHECK(damaged("solution.csv", ""));
  CHECK(damaged("solution.csv", "t,x,q\n0,0,abc\n"));
  CHECK(damaged("w.csv", "t,w\n"));
  CHECK(damaged("field.json", "{"));
  CHECK(damaged("measure.csv", "t,xi,weight\n0,0.1,-1\n"));
  CHECK(damaged("origin.csv", "t,q\n"));
  CHECK_THROWS_AS(read_field((fs::path(KDVBVP_TEST_TMP) / "nowhere").string()), Error);
}

TEST_CASE("format_double keeps 17 digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

}  // TEST_SUITE
