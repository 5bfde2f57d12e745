// kdvbvp: command-line front end.
//
//   kdvbvp flows    [--max-nu N] [--max-n M]
//   kdvbvp spectral --config run.json
//   kdvbvp solve    --config run.json [--output dir] [--tol eps] [--max-order K]
//   kdvbvp verify   --output dir [--tol eps]
//
// Exit codes: 0 ok, 2 configuration error, 3 mathematical precondition failed, 4 verification failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "kdvbvp/config.hpp"
#include "kdvbvp/diffpoly.hpp"
#include "kdvbvp/error.hpp"
#include "kdvbvp/io.hpp"
#include "kdvbvp/verify.hpp"

namespace {

using namespace kdvbvp;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMath = 3;
constexpr int kExitVerify = 4;

int cmd_flows(int max_nu, int max_n) {
  std::string text;
  for (int nu = 0; nu <= max_nu; ++nu) text += "X" + std::to_string(nu) + " = " + kdv_flow(nu).to_string() + '\n';
  for (int n = 1; n <= max_n; ++n) text += "beta" + std::to_string(n) + " = " + beta_poly(n).to_string() + '\n';
  std::cout << text;
  return kExitOk;
}

int cmd_spectral(const std::string& config) {
  const RunConfig run = load_run_config(config);
  const SpectralSetup setup = SpectralSetup::create(FlowCoefficients{run.C}, run.mu_star);
  std::cout << spectral_to_json(setup).dump(2) << '\n';
  return kExitOk;
}

void print_report(const VerificationReport& rep) {
  for (const auto& d : rep.details) {
    std::fprintf(stderr, "%-13s %s  %.3e (tol %.1e)  %s\n", d.check.c_str(), d.passed ? "ok  " : "FAIL", d.value,
                 d.tolerance, d.note.c_str());
  }
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::config_invalid, "cannot write '" + p.string() + "'");
  out << j.dump(2) << '\n';
}

int cmd_solve(const std::string& config, const std::string& output, std::optional<double> tol, int max_order) {
  RunConfig run = load_run_config(config);
  if (!output.empty()) run.output_dir = output;
  if (tol) run.tolerances.residual = *tol;
  const ProblemConfig cfg = make_problem(run);

  const SolutionField field = solve(cfg, run.t_grid.points(), run.x_grid.points(), max_order);
  write_field(field, run.output_dir);

  nlohmann::json meta;
  meta["spectral"] = spectral_to_json(cfg.setup());
  meta["mu_lower"] = cfg.mu_lower();
  meta["solitons"] = soliton_data_to_json(cfg.seed());
  meta["w0"] = cfg.w0();
  meta["tolerances"] = {{"residual", run.tolerances.residual},
                        {"boundary", run.tolerances.boundary},
                        {"laurent", run.tolerances.laurent},
                        {"remark42", run.tolerances.remark42}};
  write_json(std::filesystem::path(run.output_dir) / "run.json", meta);

  const VerificationReport rep = verify(field, run.tolerances);
  write_json(std::filesystem::path(run.output_dir) / "report.json", rep.to_json());
  print_report(rep);
  return rep.passed() ? kExitOk : kExitVerify;
}

int cmd_verify(const std::string& dir, std::optional<double> tol) {
  Tolerances tolerances;
  std::ifstream run_in(std::filesystem::path(dir) / "run.json");
  if (run_in) {
    nlohmann::json meta;
    try {
      run_in >> meta;
      if (meta.contains("tolerances")) {
        const auto& t = meta.at("tolerances");
        tolerances.residual = t.value("residual", tolerances.residual);
        tolerances.boundary = t.value("boundary", tolerances.boundary);
        tolerances.laurent = t.value("laurent", tolerances.laurent);
        tolerances.remark42 = t.value("remark42", tolerances.remark42);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::config_invalid, std::string("run.json: ") + e.what());
    }
  }
  if (tol) tolerances.residual = *tol;
  const SolutionField field = read_field(dir);
  const VerificationReport rep = verify(field, tolerances);
  std::cout << rep.to_json().dump(2) << '\n';
  print_report(rep);
  return rep.passed() ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary value problems for the KdV hierarchy via Weyl function transforms"};
  app.require_subcommand(1);

  int max_nu = 2;
  int max_n = 5;
  std::string config;
  std::string output;
  double tol_value = 0.0;
  int max_order = 0;

  auto* flows = app.add_subcommand("flows", "print the flow polynomials X_nu and boundary functionals beta_n");
  flows->add_option("--max-nu", max_nu, "highest flow index")->check(CLI::NonNegativeNumber);
  flows->add_option("--max-n", max_n, "highest beta index")->check(CLI::NonNegativeNumber);

  auto* spectral = app.add_subcommand("spectral", "print the spectral setup for C and mu_star");
  spectral->add_option("--config", config, "run configuration (JSON)")->required();

  auto* solve_cmd = app.add_subcommand("solve", "construct q(x, t) and verify it");
  solve_cmd->add_option("--config", config, "run configuration (JSON)")->required();
  solve_cmd->add_option("--output", output, "output directory (overrides output_dir)");
  auto* solve_tol = solve_cmd->add_option("--tol", tol_value, "PDE residual tolerance");
  solve_cmd->add_option("--max-order", max_order, "jet order written per grid point")
      ->check(CLI::Range(1, kMaxJetOrder));

  auto* verify_cmd = app.add_subcommand("verify", "re-run the checks on exported data");
  verify_cmd->add_option("--output", output, "directory written by solve")->required();
  auto* verify_tol = verify_cmd->add_option("--tol", tol_value, "PDE residual tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*flows) return cmd_flows(max_nu, max_n);
    if (*spectral) return cmd_spectral(config);
    if (*solve_cmd) {
      return cmd_solve(config, output, *solve_tol ? std::optional<double>(tol_value) : std::nullopt, max_order);
    }
    if (*verify_cmd) return cmd_verify(output, *verify_tol ? std::optional<double>(tol_value) : std::nullopt);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return is_config_error(e.code()) ? kExitConfig : kExitMath;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return kExitMath;
  }
  return kExitOk;
}
