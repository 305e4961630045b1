#ifndef SYNCSIM_EXPERIMENTS_HPP
#define SYNCSIM_EXPERIMENTS_HPP

#include <map>
#include <string>
#include <vector>

#include "syncsim/config.hpp"

namespace syncsim {

/// Machine-readable outcome of one experiment run. Every scalar is traceable
/// to an emitted CSV; assertions carry the experiment, seed subset, and
/// threshold they were checked against.
struct RunSummary {
  std::string experiment;
  std::uint64_t config_hash = 0;
  bool pass = false;
  bool inconclusive = false;
  std::map<std::string, double> scalars;
  std::vector<std::string> assertions;
  std::vector<std::string> artifacts;
  std::vector<std::uint64_t> seeds;

  // 0 pass, 1 assertion failure, 2 inconclusive
  int exit_code() const { return inconclusive ? 2 : (pass ? 0 : 1); }

  std::string to_json() const;
};

/// Runs the configured experiment, emitting CSV artifacts and summary.json
/// under the output directory. Deterministic given the config. Independent
/// (seed, nu) work items are dispatched to at most `workers` threads.
RunSummary run_experiment(const ExperimentConfig& config, int workers = 1);

}  // namespace syncsim

#endif
