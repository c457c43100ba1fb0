#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "flexseas/asymptotics.hpp"
#include "flexseas/estimator.hpp"
#include "flexseas/model.hpp"
#include "flexseas/weakdep.hpp"

namespace flexseas {

/// FNV-1a 64-bit over the canonical (sorted-key, no-whitespace) rendering
/// of a JSON document, so semantically equal configs hash equally.
std::uint64_t canonical_json_hash(const std::string& json_text);

/// Strict parsers: unknown keys, wrong types, and out-of-range values all
/// throw ConfigError with the offending key path in the message.

/// {"input": "panel.csv", "kernel": "...", "bandwidth": h,
///  "grid_points": m (optional), "min_denominator": eps (optional)}
struct FitRequest {
  std::string input;  // panel CSV path
  FitConfig fit;
  int grid_points = 401;
};
FitRequest parse_fit_config(const std::string& json_text);

/// Simulation config: curve preset, error process, sample size, seed.
struct SimulateRequest {
  int n = 0;
  std::uint64_t seed = 1;
  CurveSet curves;
  std::optional<ErrorProcessSpec> error;  // absent for noiseless panels
  std::string curves_echo;
  std::string error_echo;
};
SimulateRequest parse_simulate_config(const std::string& json_text);

/// Monte Carlo experiment config for all four studies.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& study);

/// Shared sub-object parsers (exposed for tests). The curve object carries
/// its own season count; a short human-readable echo can be captured.
ErrorProcessSpec parse_error_process(const std::string& json_text,
                                     std::string* echo = nullptr);
CurveSet parse_curves(const std::string& json_text,
                      std::string* echo = nullptr);

std::string matrix_to_json(const Eigen::MatrixXd& m);   // row-major nested arrays
Eigen::MatrixXd matrix_from_json(const std::string& json_text);

/// Reads a whole file; throws ConfigError when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace flexseas
