#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "syncsim/config.hpp"
#include "syncsim/experiments.hpp"

namespace {

int run_command(const std::string& config_path, const std::vector<std::uint64_t>& seeds_override,
                const std::string& out_dir, int workers) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config file: " << config_path << "\n";
    return 3;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  syncsim::ParseResult parsed = syncsim::parse_config(buf.str());
  if (!parsed.ok) {
    for (const auto& err : parsed.errors) {
      std::cerr << "config error at " << err.path << ": " << err.message << "\n";
    }
    return 3;
  }
  syncsim::ExperimentConfig config = parsed.config;
  if (!seeds_override.empty()) config.seeds = seeds_override;
  if (!out_dir.empty()) config.output_dir = out_dir;

  try {
    syncsim::RunSummary summary = syncsim::run_experiment(config, workers);
    for (const auto& line : summary.assertions) std::cout << line << "\n";
    std::cout << (summary.inconclusive ? "INCONCLUSIVE" : (summary.pass ? "PASS" : "FAIL"))
              << " " << summary.experiment << " (config " << std::hex << summary.config_hash
              << std::dec << ")\n";
    return summary.exit_code();
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
}

int spectral_check_command(int p_max) {
  syncsim::ExperimentConfig config;
  config.experiment = "spectral-check";
  config.tolerances = syncsim::default_tolerances();
  config.tolerances["p_max"] = p_max;
  syncsim::RunSummary summary = syncsim::run_experiment(config, 1);
  for (const auto& line : summary.assertions) std::cout << line << "\n";
  std::cout << (summary.pass ? "PASS" : "FAIL") << " spectral-check\n";
  return summary.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathwise synchronization experiments for coupled stochastic systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds_override;
  std::string out_dir;
  int workers = 1;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Path to the JSON config")->required();
  run->add_option("--seeds-override", seeds_override, "Replace the config seed list");
  run->add_option("--out", out_dir, "Output directory (default: config, then $SYNCSIM_OUT)");
  run->add_option("--workers", workers, "Worker threads for independent seeds")
      ->check(CLI::PositiveNumber);

  int p_max = 50;
  CLI::App* spectral = app.add_subcommand("spectral-check", "Eigenvalue formula self-test");
  spectral->add_option("--p-max", p_max, "Largest matrix size to test")
      ->check(CLI::PositiveNumber);

  CLI::App* schema =
      app.add_subcommand("print-config-schema", "Print the accepted config keys and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (run->parsed()) return run_command(config_path, seeds_override, out_dir, workers);
  if (spectral->parsed()) return spectral_check_command(p_max);
  if (schema->parsed()) {
    std::cout << syncsim::config_schema();
    return 0;
  }
  return 3;
}
