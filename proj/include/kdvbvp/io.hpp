#pragma once

// JSON and CSV serialization. Field data is written with 17 significant digits so that a
// reload reproduces every double exactly.

#include <string>

#include "json.hpp"
#include "kdvbvp/pipeline.hpp"
#include "kdvbvp/soliton.hpp"
#include "kdvbvp/spectral.hpp"

namespace kdvbvp {

/// [{"kappa": k, "g": g}, ...]; throws config-invalid.
SolitonData soliton_data_from_json(const nlohmann::json& j);
nlohmann::json soliton_data_to_json(const SolitonData& data);

/// {s, C, d, delta, mu_minus, mu_star, c0, c, cprime, gamma, a}, values rounded to 15 digits.
nlohmann::json spectral_to_json(const SpectralSetup& setup);

/// Writes solution.csv, origin.csv, w.csv, measure.csv and field.json into dir.
void write_field(const SolutionField& field, const std::string& dir);

/// Inverse of write_field; throws config-invalid on missing, empty or malformed files.
SolutionField read_field(const std::string& dir);

std::string format_double(double v);

}  // namespace kdvbvp
