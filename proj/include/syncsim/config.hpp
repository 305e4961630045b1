#ifndef SYNCSIM_CONFIG_HPP
#define SYNCSIM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "syncsim/system.hpp"
#include "syncsim/time_grid.hpp"

namespace syncsim {

/// Validated experiment configuration. Parsed from strict JSON: unknown keys
/// are rejected, all violations are reported together.
struct ExperimentConfig {
  std::string experiment;

  // system
  int N = 4;
  int d = 1;
  double nu = 1.0;
  std::string drift_kind = "linear";           // linear | cubic | affine
  std::vector<double> lambdas = {1.0};         // broadcast to N when size 1
  double cubic_a = 1.0;
  double cubic_b = 1.0;
  std::vector<double> affine_offsets = {1.0};  // broadcast to N when size 1
  std::vector<std::vector<double>> coeff_rows = {{0.5}};  // broadcast to N when 1 row

  // grid
  double t_min = -50.0;
  double t_max = 50.0;
  double h = 0.01;

  std::vector<std::uint64_t> seeds = {1};
  std::vector<double> nus = {1.0, 10.0, 100.0};
  double window_t0 = 1.0;
  double window_t1 = 2.0;
  std::vector<double> depths = {20.0, 30.0};
  std::map<std::string, double> tolerances;  // filled with defaults
  std::string output_dir;

  TimeGrid grid() const { return TimeGrid::make(t_min, t_max, h); }
  SystemSpec system(double nu_override) const;
  SystemSpec system() const { return system(nu); }
  Eigen::MatrixXd coeff_matrix() const;

  /// Canonical serialization (sorted keys) used for hashing and provenance.
  std::string canonical_json() const;
};

struct ConfigError {
  std::string path;
  std::string message;
};

struct ParseResult {
  bool ok = false;
  ExperimentConfig config;
  std::vector<ConfigError> errors;
};

ParseResult parse_config(const std::string& text);

const std::vector<std::string>& experiment_names();
const std::map<std::string, double>& default_tolerances();
std::string config_schema();

/// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace syncsim

#endif
