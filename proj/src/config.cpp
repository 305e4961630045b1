#include "syncsim/config.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

namespace syncsim {

using nlohmann::json;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "pairwise-sync",   "pullback-attractor", "nu-sweep",
      "averaged-convergence", "conjugacy-check", "spectral-check"};
  return names;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> defaults = {
      {"envelope_slack", 0.05},       // (1 + slack) factor on the contraction envelope
      {"envelope_fraction", 0.90},    // required fraction of seeds passing the envelope
      {"rate_max", -0.9},             // fitted decay-rate ceiling, deterministic benchmark
      {"attractor", 1e-8},            // singleton / Cauchy tolerance for pullback runs
      {"invariance", 1e-7},           // shifted-noise re-evaluation tolerance
      {"invariance_shift", 1.0},      // evaluation-time offset for the invariance check
      {"attractor_fraction", 0.90},   // required fraction of converged seeds
      {"conjugacy", 1e-2},            // relative sup-gap between the two frames
      {"conjugacy_fraction", 0.95},   // required fraction of seeds within the gap
      {"slope_center", -1.0},         // expected log-log slope of the nu sweep
      {"slope_band", 0.3},            // allowed deviation around slope_center
      {"decrease_fraction", 0.90},    // fraction of seeds with nu-monotone distances
      {"exact_sync_floor", 1e-8},     // component-gap floor for identical noise rows
      {"spectral", 1e-10},            // closed form vs dense eigensolver
      {"p_max", 50},                  // largest tridiagonal size for spectral-check
      {"flagged_budget", 0.20},       // flagged-seed fraction before "inconclusive"
  };
  return defaults;
}

SystemSpec ExperimentConfig::system(double nu_override) const {
  std::vector<DriftSpec> drifts;
  for (int j = 0; j < N; ++j) {
    const double lambda = lambdas[lambdas.size() == 1 ? 0 : static_cast<size_t>(j)];
    if (drift_kind == "linear") {
      drifts.push_back(DriftSpec::linear(d, lambda));
    } else if (drift_kind == "cubic") {
      drifts.push_back(DriftSpec::cubic(d, cubic_a, cubic_b));
    } else {
      const double offset =
          affine_offsets[affine_offsets.size() == 1 ? 0 : static_cast<size_t>(j)];
      drifts.push_back(DriftSpec::affine(d, lambda, Eigen::VectorXd::Constant(d, offset)));
    }
  }
  return SystemSpec::make(std::move(drifts), coeff_matrix(), nu_override);
}

Eigen::MatrixXd ExperimentConfig::coeff_matrix() const {
  const size_t m = coeff_rows.front().size();
  Eigen::MatrixXd coeffs(N, static_cast<int>(m));
  for (int j = 0; j < N; ++j) {
    const auto& row = coeff_rows[coeff_rows.size() == 1 ? 0 : static_cast<size_t>(j)];
    for (size_t i = 0; i < m; ++i) coeffs(j, static_cast<int>(i)) = row[i];
  }
  return coeffs;
}

std::string ExperimentConfig::canonical_json() const {
  json root;
  root["experiment"] = experiment;
  root["system"] = {{"N", N},
                    {"d", d},
                    {"nu", nu},
                    {"drift", {{"kind", drift_kind},
                               {"lambdas", lambdas},
                               {"a", cubic_a},
                               {"b", cubic_b},
                               {"offsets", affine_offsets}}},
                    {"coeffs", coeff_rows}};
  root["grid"] = {{"t_min", t_min}, {"t_max", t_max}, {"h", h}};
  root["seeds"] = seeds;
  root["nus"] = nus;
  root["window"] = {window_t0, window_t1};
  root["depths"] = depths;
  root["tolerances"] = tolerances;
  // output_dir is deliberately excluded: where artifacts land does not change
  // what was computed, and the hash goes into the artifacts themselves.
  return root.dump();  // nlohmann keeps object keys sorted
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string text = config.canonical_json();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

struct Parser {
  std::vector<ConfigError>& errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back({path, message});
  }

  void check_keys(const json& obj, const std::string& path,
                  const std::vector<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        fail(path + "." + it.key(), "unknown key");
      }
    }
  }

  template <class T>
  bool read(const json& obj, const std::string& path, const std::string& key, T& out) {
    if (!obj.contains(key)) return false;
    try {
      out = obj.at(key).get<T>();
      return true;
    } catch (const json::exception&) {
      fail(path + "." + key, "type mismatch");
      return false;
    }
  }
};

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    result.errors.push_back({"$", std::string("invalid JSON: ") + err.what()});
    return result;
  }
  if (!root.is_object()) {
    result.errors.push_back({"$", "top level must be an object"});
    return result;
  }

  Parser p{result.errors};
  ExperimentConfig& cfg = result.config;
  cfg.tolerances = default_tolerances();

  p.check_keys(root, "$",
               {"experiment", "system", "grid", "seeds", "nus", "window", "depths",
                "tolerances", "output_dir"});

  if (!p.read(root, "$", "experiment", cfg.experiment)) {
    p.fail("$.experiment", "missing required key");
  } else {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
      p.fail("$.experiment", "unknown experiment name: " + cfg.experiment);
    }
  }

  if (root.contains("system")) {
    const json& sys = root.at("system");
    if (!sys.is_object()) {
      p.fail("$.system", "must be an object");
    } else {
      p.check_keys(sys, "$.system", {"N", "d", "nu", "drift", "coeffs"});
      p.read(sys, "$.system", "N", cfg.N);
      p.read(sys, "$.system", "d", cfg.d);
      p.read(sys, "$.system", "nu", cfg.nu);
      if (cfg.N < 3) p.fail("$.system.N", "N must be >= 3");
      if (cfg.d < 1) p.fail("$.system.d", "d must be >= 1");
      if (!(cfg.nu > 0.0)) p.fail("$.system.nu", "nu must be positive");
      if (sys.contains("drift")) {
        const json& drift = sys.at("drift");
        if (!drift.is_object()) {
          p.fail("$.system.drift", "must be an object");
        } else {
          p.check_keys(drift, "$.system.drift",
                       {"kind", "lambda", "lambdas", "a", "b", "offset", "offsets"});
          p.read(drift, "$.system.drift", "kind", cfg.drift_kind);
          if (cfg.drift_kind != "linear" && cfg.drift_kind != "cubic" &&
              cfg.drift_kind != "affine") {
            p.fail("$.system.drift.kind", "must be linear, cubic, or affine");
          }
          double lambda = 0.0;
          if (p.read(drift, "$.system.drift", "lambda", lambda)) cfg.lambdas = {lambda};
          p.read(drift, "$.system.drift", "lambdas", cfg.lambdas);
          p.read(drift, "$.system.drift", "a", cfg.cubic_a);
          p.read(drift, "$.system.drift", "b", cfg.cubic_b);
          double offset = 0.0;
          if (p.read(drift, "$.system.drift", "offset", offset)) {
            cfg.affine_offsets = {offset};
          }
          p.read(drift, "$.system.drift", "offsets", cfg.affine_offsets);
          for (double l : cfg.lambdas) {
            if (!(l > 0.0)) p.fail("$.system.drift.lambdas", "lambdas must be positive");
          }
          if (cfg.lambdas.size() != 1 && cfg.lambdas.size() != static_cast<size_t>(cfg.N)) {
            p.fail("$.system.drift.lambdas", "need 1 or N entries");
          }
          if (cfg.affine_offsets.empty() ||
              (cfg.affine_offsets.size() != 1 &&
               cfg.affine_offsets.size() != static_cast<size_t>(cfg.N))) {
            p.fail("$.system.drift.offsets", "need 1 or N entries");
          }
        }
      }
      if (p.read(sys, "$.system", "coeffs", cfg.coeff_rows)) {
        if (cfg.coeff_rows.empty()) {
          p.fail("$.system.coeffs", "need at least one row");
        } else {
          const size_t m = cfg.coeff_rows.front().size();
          if (m == 0) p.fail("$.system.coeffs", "rows must be non-empty");
          for (const auto& row : cfg.coeff_rows) {
            if (row.size() != m) p.fail("$.system.coeffs", "rows must have equal length");
          }
          if (cfg.coeff_rows.size() != 1 &&
              cfg.coeff_rows.size() != static_cast<size_t>(cfg.N)) {
            p.fail("$.system.coeffs", "need 1 or N rows");
          }
        }
      }
    }
  }

  if (root.contains("grid")) {
    const json& grid = root.at("grid");
    if (!grid.is_object()) {
      p.fail("$.grid", "must be an object");
    } else {
      p.check_keys(grid, "$.grid", {"t_min", "t_max", "h"});
      p.read(grid, "$.grid", "t_min", cfg.t_min);
      p.read(grid, "$.grid", "t_max", cfg.t_max);
      p.read(grid, "$.grid", "h", cfg.h);
      if (!(cfg.h > 0.0)) p.fail("$.grid.h", "h must be positive");
      if (!(cfg.t_min < cfg.t_max)) p.fail("$.grid", "t_min must be less than t_max");
    }
  }

  p.read(root, "$", "seeds", cfg.seeds);
  if (cfg.seeds.empty()) p.fail("$.seeds", "seeds must be non-empty");

  p.read(root, "$", "nus", cfg.nus);
  for (size_t i = 1; i < cfg.nus.size(); ++i) {
    if (cfg.nus[i] <= cfg.nus[i - 1]) {
      p.fail("$.nus", "nus not ascending");
      break;
    }
  }

  if (root.contains("window")) {
    std::vector<double> window;
    if (p.read(root, "$", "window", window)) {
      if (window.size() != 2 || !(window[0] < window[1])) {
        p.fail("$.window", "window must be [T1, T2] with T1 < T2");
      } else {
        cfg.window_t0 = window[0];
        cfg.window_t1 = window[1];
      }
    }
  }

  p.read(root, "$", "depths", cfg.depths);
  for (size_t i = 1; i < cfg.depths.size(); ++i) {
    if (cfg.depths[i] <= cfg.depths[i - 1]) {
      p.fail("$.depths", "depths must be increasing");
      break;
    }
  }
  if (cfg.depths.empty()) p.fail("$.depths", "depths must be non-empty");

  if (root.contains("tolerances")) {
    const json& tol = root.at("tolerances");
    if (!tol.is_object()) {
      p.fail("$.tolerances", "must be an object");
    } else {
      for (auto it = tol.begin(); it != tol.end(); ++it) {
        if (cfg.tolerances.find(it.key()) == cfg.tolerances.end()) {
          p.fail("$.tolerances." + it.key(), "unknown tolerance name");
          continue;
        }
        if (!it.value().is_number()) {
          p.fail("$.tolerances." + it.key(), "type mismatch");
          continue;
        }
        cfg.tolerances[it.key()] = it.value().get<double>();
      }
    }
  }

  p.read(root, "$", "output_dir", cfg.output_dir);

  // Cross-checks that only make sense on otherwise valid values.
  if (result.errors.empty()) {
    try {
      cfg.grid();
      cfg.system();
    } catch (const std::exception& err) {
      p.fail("$", err.what());
    }
  }

  result.ok = result.errors.empty();
  return result;
}

std::string config_schema() {
  std::ostringstream out;
  out << "Config is strict JSON; unknown keys are rejected.\n\n"
      << "{\n"
      << "  \"experiment\": one of [";
  const auto& names = experiment_names();
  for (size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
  out << "],\n"
      << "  \"system\": {\n"
      << "    \"N\": int >= 3 (default 4), \"d\": int >= 1 (default 1), \"nu\": > 0,\n"
      << "    \"drift\": { \"kind\": linear|cubic|affine, \"lambda\": > 0 or\n"
      << "               \"lambdas\": [N values], \"a\", \"b\" (cubic),\n"
      << "               \"offset\" or \"offsets\": [N values] (affine) },\n"
      << "    \"coeffs\": [[...]]  1 or N rows of equal length (drivers m)\n"
      << "  },\n"
      << "  \"grid\": { \"t_min\", \"t_max\", \"h\" },\n"
      << "  \"seeds\": [uint64, ...] non-empty,\n"
      << "  \"nus\": ascending list, \"window\": [T1, T2], \"depths\": increasing list,\n"
      << "  \"tolerances\": { name: value }, \"output_dir\": path\n"
      << "}\n\n"
      << "Known tolerances and defaults:\n";
  for (const auto& [name, value] : default_tolerances()) {
    out << "  " << name << " = " << value << "\n";
  }
  return out.str();
}

}  // namespace syncsim
