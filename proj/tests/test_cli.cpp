#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path tmp_dir(const std::string& name) {
  const fs::path p = fs::path(KDVBVP_TEST_TMP) / ("cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run run(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string("\"") + KDVBVP_CLI + "\" " + args + " >\"" + (dir / "stdout").string() +
                          "\" 2>\"" + (dir / "stderr").string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout");
  r.err = slurp(dir / "stderr");
  return r;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "run.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

json desk(const fs::path& out) {
  json j = json::parse(R"({"C": [8, 4], "mu_star": -1, "mu_lower": -0.5,
    "solitons": [{"kappa": 0.6, "g": 1.0}], "w0": {"fraction": 0.5},
    "t_grid": {"start": 0.098, "stop": 0.102, "steps": 4},
    "x_grid": {"start": -5, "stop": 5, "steps": 40}})");
  j["output_dir"] = out.string();
  return j;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("flows output matches the golden rendering") {
  const auto dir = tmp_dir("flows");
  const Run r = run("flows --max-nu 2 --max-n 5", dir);
  CHECK(r.code == 0);
  CHECK(r.out == slurp(fs::path(KDVBVP_GOLDEN) / "flows.txt"));
  const Run small = run("flows --max-nu 0 --max-n 1", dir);
  CHECK(small.out == "X0 = (1/2)*q1\nbeta1 = q0\n");
  const Run capped = run("flows --max-nu 7", dir);
  CHECK(capped.code == 2);
  CHECK(capped.out.empty());
  CHECK(capped.err.rfind("error: cap-exceeded: ", 0) == 0);
  CHECK(capped.err.find("6") != std::string::npos);
}

TEST_CASE("spectral output matches the golden values") {
  const auto dir = tmp_dir("spectral");
  const fs::path cfg = write_config(dir, desk(dir / "out"));
  const Run r = run("spectral --config \"" + cfg.string() + "\"", dir);
  REQUIRE(r.code == 0);
  const json got = json::parse(r.out);
  const json want = json::parse(slurp(fs::path(KDVBVP_GOLDEN) / "spectral_s1.json"));
  for (const auto& [key, value] : want.items()) {
    REQUIRE(got.contains(key));
    if (value.is_array()) {
      REQUIRE(got[key].size() == value.size());
      for (size_t i = 0; i < value.size(); ++i) {
        CHECK(got[key][i].get<double>() == doctest::Approx(value[i].get<double>()).epsilon(1e-12));
      }
    } else {
      CHECK(got[key].get<double>() == doctest::Approx(value.get<double>()).epsilon(1e-12));
    }
  }
  CHECK(got["mu_minus"].get<double>() == doctest::Approx(-64.0 / 27.0).epsilon(1e-13));
}

TEST_CASE("spectral error exits") {
  const auto dir = tmp_dir("spectral_err");
  json j = desk(dir / "out");
  j["C"] = {-8, 4};
  Run r = run("spectral --config \"" + write_config(dir, j).string() + "\"", dir);
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error: assumption1-violated: ", 0) == 0);
  j = desk(dir / "out");
  j["mu_star"] = -3;
  r = run("spectral --config \"" + write_config(dir, j).string() + "\"", dir);
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error: mu-out-of-range: ", 0) == 0);
}

TEST_CASE("solve writes outputs, is deterministic and re-verifies") {
  const auto dir = tmp_dir("solve");
  const fs::path out1 = dir / "a", out2 = dir / "b";
  json j = desk(out1);
  const fs::path cfg = write_config(dir, j);
  Run r = run("solve --config \"" + cfg.string() + "\"", dir);
  REQUIRE(r.code == 0);
  r = run("solve --config \"" + cfg.string() + "\" --output \"" + out2.string() + "\"", dir);
  REQUIRE(r.code == 0);
  for (const char* f : {"solution.csv", "origin.csv", "w.csv", "measure.csv", "field.json", "report.json"}) {
    CHECK_MESSAGE(slurp(out1 / f) == slurp(out2 / f), f);
    CHECK(!slurp(out1 / f).empty());
  }
  CHECK(slurp(out1 / "solution.csv").rfind("t,x,q,q_x,q_xx,q_xxx", 0) == 0);
  CHECK(slurp(out1 / "w.csv").rfind("t,w,", 0) == 0);
  const json rep = json::parse(slurp(out1 / "report.json"));
  CHECK(rep["passed"].get<bool>());
  CHECK(rep["residual_sup"].get<double>() <= 1e-6);

  r = run("verify --output \"" + out1.string() + "\"", dir);
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["passed"].get<bool>());
}

TEST_CASE("solve with an absurd tolerance exits with the verification code") {
  const auto dir = tmp_dir("tol");
  const fs::path cfg = write_config(dir, desk(dir / "out"));
  const Run r = run("solve --config \"" + cfg.string() + "\" --tol 1e-30", dir);
  CHECK(r.code == 4);
  CHECK(json::parse(slurp(dir / "out" / "report.json"))["passed"].get<bool>() == false);
}

TEST_CASE("verify detects a corrupted CSV") {
  const auto dir = tmp_dir("corrupt");
  const fs::path out = dir / "out";
  REQUIRE(run("solve --config \"" + write_config(dir, desk(out)).string() + "\"", dir).code == 0);
  // scale every jet value at the middle time slice (41 x points per slice) by 1.01
  std::ifstream in(out / "solution.csv");
  std::ostringstream os;
  std::string line;
  std::getline(in, line);
  os << line << '\n';
  for (int row = 0; std::getline(in, line); ++row) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (row / 41 == 2) {
      for (size_t k = 2; k < cells.size(); ++k) {
        std::ostringstream v;
        v.precision(17);
        v << std::stod(cells[k]) * 1.01;
        cells[k] = v.str();
      }
    }
    for (size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
    os << '\n';
  }
  in.close();
  std::ofstream(out / "solution.csv", std::ios::trunc) << os.str();
  const Run r = run("verify --output \"" + out.string() + "\"", dir);
  CHECK(r.code == 4);
}

TEST_CASE("verify of an empty file errors cleanly") {
  const auto dir = tmp_dir("empty");
  const fs::path out = dir / "out";
  REQUIRE(run("solve --config \"" + write_config(dir, desk(out)).string() + "\"", dir).code == 0);
  std::ofstream(out / "w.csv", std::ios::trunc);
  const Run r = run("verify --output \"" + out.string() + "\"", dir);
  CHECK(r.code == 2);
  CHECK(r.err.rfind("error: config-invalid: ", 0) == 0);
  CHECK(r.err.find('\n') == r.err.size() - 1);
}

TEST_CASE("configuration and precondition errors") {
  const auto dir = tmp_dir("errors");
  Run r = run("solve --config \"" + (dir / "missing.json").string() + "\"", dir);
  CHECK(r.code == 2);
  json j = desk(dir / "out");
  j["w0"] = 5.0;
  r = run("solve --config \"" + write_config(dir, j).string() + "\"", dir);
  CHECK(r.code == 3);
  CHECK(r.err.rfind("error: w0-out-of-bracket: ", 0) == 0);
  r = run("frobnicate", dir);
  CHECK(r.code == 2);
  r = run("solve", dir);
  CHECK(r.code == 2);
  r = run("solve --config x --max-order 99", dir);
  CHECK(r.code == 2);
}

}  // TEST_SUITE
