#include "kdvbvp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kdvbvp/error.hpp"

namespace kdvbvp {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config_invalid: return "config-invalid";
    case ErrorCode::cap_exceeded: return "cap-exceeded";
    case ErrorCode::jet_too_short: return "jet-too-short";
    case ErrorCode::antiderivative_not_exact: return "antiderivative-not-exact";
    case ErrorCode::assumption1_violated: return "assumption1-violated";
    case ErrorCode::normalization_violated: return "normalization-violated";
    case ErrorCode::no_negative_critical_point: return "no-negative-critical-point";
    case ErrorCode::mu_out_of_range: return "mu-out-of-range";
    case ErrorCode::eta_out_of_range: return "eta-out-of-range";
    case ErrorCode::singular_matrix: return "singular-matrix";
    case ErrorCode::pole_weight_nonpositive: return "pole-weight-nonpositive";
    case ErrorCode::glue_mismatch: return "glue-mismatch";
    case ErrorCode::root_count_mismatch: return "root-count-mismatch";
    case ErrorCode::division_by_zero: return "division-by-zero";
    case ErrorCode::inadmissible_sign: return "inadmissible-sign";
    case ErrorCode::roundtrip_failure: return "roundtrip-failure";
    case ErrorCode::w0_out_of_bracket: return "w0-out-of-bracket";
    case ErrorCode::bracket_violation: return "bracket-violation";
    case ErrorCode::nonpositive_weight: return "nonpositive-weight";
    case ErrorCode::pole_collision: return "pole-collision";
    case ErrorCode::classification_failure: return "classification-failure";
    case ErrorCode::grid_too_coarse: return "grid-too-coarse";
  }
  return "unknown";
}

bool is_config_error(ErrorCode code) noexcept {
  return code == ErrorCode::config_invalid || code == ErrorCode::cap_exceeded;
}

namespace {

[[noreturn]] void config_fail(const std::string& what) {
  throw Error(ErrorCode::config_invalid, what);
}

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) config_fail(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) config_fail(std::string("field '") + key + "' must be a number");
  double v = j.at(key).get<double>();
  if (!std::isfinite(v)) config_fail(std::string("field '") + key + "' must be finite");
  return v;
}

GridSpec parse_grid(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) config_fail(std::string("missing field '") + key + "'");
  const auto& g = j.at(key);
  if (!g.is_object()) config_fail(std::string("field '") + key + "' must be an object");
  GridSpec spec;
  spec.start = require_number(g, "start");
  spec.stop = require_number(g, "stop");
  double steps = require_number(g, "steps");
  if (steps < 0 || std::floor(steps) != steps) {
    config_fail(std::string(key) + ".steps must be a nonnegative integer");
  }
  spec.steps = static_cast<int>(steps);
  if (spec.steps > 0 && !(spec.stop > spec.start)) {
    config_fail(std::string(key) + ".stop must exceed start when steps > 0");
  }
  return spec;
}

}  // namespace

std::vector<double> GridSpec::points() const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(steps) + 1);
  if (steps == 0) {
    out.push_back(start);
    return out;
  }
  const double h = (stop - start) / steps;
  for (int i = 0; i <= steps; ++i) out.push_back(i == steps ? stop : start + i * h);
  return out;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) config_fail("configuration must be a JSON object");
  RunConfig cfg;

  if (!j.contains("C") || !j.at("C").is_array()) config_fail("field 'C' must be an array of numbers");
  for (const auto& c : j.at("C")) {
    if (!c.is_number()) config_fail("field 'C' must contain only numbers");
    cfg.C.push_back(c.get<double>());
  }
  if (cfg.C.size() < 2) config_fail("field 'C' needs at least two coefficients (s >= 1)");

  cfg.mu_star = require_number(j, "mu_star");
  if (j.contains("mu_lower")) cfg.mu_lower = require_number(j, "mu_lower");

  if (j.contains("solitons")) {
    if (!j.at("solitons").is_array()) config_fail("field 'solitons' must be an array");
    cfg.solitons = soliton_data_from_json(j.at("solitons"));
  }

  if (j.contains("w0")) {
    const auto& w = j.at("w0");
    if (w.is_number()) {
      cfg.w0 = W0Spec{false, w.get<double>()};
    } else if (w.is_object() && w.contains("fraction")) {
      double f = require_number(w, "fraction");
      if (!(f > 0.0 && f < 1.0)) config_fail("w0.fraction must lie in (0, 1)");
      cfg.w0 = W0Spec{true, f};
    } else {
      config_fail("field 'w0' must be a number or {\"fraction\": f}");
    }
  }

  if (j.contains("t_grid")) cfg.t_grid = parse_grid(j, "t_grid");
  if (j.contains("x_grid")) cfg.x_grid = parse_grid(j, "x_grid");

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (!t.is_object()) config_fail("field 'tolerances' must be an object");
    if (t.contains("residual")) cfg.tolerances.residual = require_number(t, "residual");
    if (t.contains("boundary")) cfg.tolerances.boundary = require_number(t, "boundary");
    if (t.contains("laurent")) cfg.tolerances.laurent = require_number(t, "laurent");
    if (t.contains("remark42")) cfg.tolerances.remark42 = require_number(t, "remark42");
  }
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) config_fail("field 'output_dir' must be a string");
    cfg.output_dir = j.at("output_dir").get<std::string>();
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_fail("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    config_fail("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

ProblemConfig make_problem(const RunConfig& run) {
  SpectralSetup setup = SpectralSetup::create(FlowCoefficients{run.C}, run.mu_star);
  double mu_lower = run.mu_lower.value_or(run.mu_star / 2.0);
  double w0 = 0.0;
  if (run.w0.is_fraction) {
    auto [lo, hi] = seed_bracket(run.solitons, setup.kappa_star_upper(), 0.0);
    w0 = lo + run.w0.value * (hi - lo);
  } else {
    w0 = run.w0.value;
  }
  return ProblemConfig::create(std::move(setup), mu_lower, run.solitons, w0);
}

}  // namespace kdvbvp
