#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kdvbvp {

enum class ErrorCode {
  // configuration
  config_invalid,
  cap_exceeded,
  // diffpoly
  jet_too_short,
  antiderivative_not_exact,
  // spectral
  assumption1_violated,
  normalization_violated,
  no_negative_critical_point,
  mu_out_of_range,
  eta_out_of_range,
  // soliton
  singular_matrix,
  pole_weight_nonpositive,
  glue_mismatch,
  root_count_mismatch,
  division_by_zero,
  inadmissible_sign,
  roundtrip_failure,
  // pipeline
  w0_out_of_bracket,
  bracket_violation,
  nonpositive_weight,
  pole_collision,
  classification_failure,
  // verify
  grid_too_coarse,
};

/// Stable machine-readable name, e.g. "assumption1-violated".
std::string_view error_code_name(ErrorCode code) noexcept;

/// True for errors caused by malformed input rather than violated math preconditions.
bool is_config_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kdvbvp
