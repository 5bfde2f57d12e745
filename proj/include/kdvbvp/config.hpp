#pragma once

// Run configuration as read from the CLI JSON file.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kdvbvp/io.hpp"
#include "kdvbvp/pipeline.hpp"
#include "kdvbvp/spectral.hpp"
#include "kdvbvp/verify.hpp"

namespace kdvbvp {

/// `steps` intervals between start and stop (steps + 1 points); steps = 0 is the single point start.
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int steps = 0;

  std::vector<double> points() const;
};

/// Either an absolute w0 or a fraction of the admissible bracket at t = 0.
struct W0Spec {
  bool is_fraction = true;
  double value = 0.5;
};

struct RunConfig {
  std::vector<double> C;
  double mu_star = 0.0;
  std::optional<double> mu_lower;  ///< defaults to mu_star / 2
  SolitonData solitons;
  W0Spec w0;
  GridSpec t_grid;
  GridSpec x_grid;
  Tolerances tolerances;
  std::string output_dir = "out";
};

/// Throws config-invalid with the offending field named.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Builds and validates the problem; errors from the spectral and pipeline modules propagate.
ProblemConfig make_problem(const RunConfig& run);

}  // namespace kdvbvp
