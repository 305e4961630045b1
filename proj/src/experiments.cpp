#include "syncsim/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "syncsim/csv.hpp"
#include "syncsim/integrate.hpp"
#include "syncsim/spectral.hpp"
#include "syncsim/sync.hpp"

#include "json.hpp"

namespace syncsim {

namespace {

namespace fs = std::filesystem;

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fs::path resolve_out_dir(const ExperimentConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("SYNCSIM_OUT")) return env;
  return "syncsim-out";
}

template <class F>
void parallel_for(int n, int workers, F f) {
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct Checker {
  RunSummary* summary;

  bool require(bool ok, const std::string& text) {
    summary->assertions.push_back(std::string(ok ? "pass: " : "FAIL: ") + text);
    if (!ok) summary->pass = false;
    return ok;
  }
};

std::string seed_span(const std::vector<std::uint64_t>& seeds) {
  std::ostringstream os;
  os << seeds.size() << " seeds [" << seeds.front() << ".." << seeds.back() << "]";
  return os.str();
}

double max_row_norm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).rowwise().norm().maxCoeff();
}

/// Shared per-experiment bookkeeping: flagged seeds count against the budget
/// and excluded seeds never count towards pass fractions.
bool apply_flag_budget(RunSummary& summary, int flagged, int total, double budget) {
  double fraction = total ? static_cast<double>(flagged) / total : 0.0;
  summary.scalars["flagged_fraction"] = fraction;
  if (fraction > budget) {
    summary.inconclusive = true;
    std::ostringstream os;
    os << "inconclusive: flagged fraction " << fraction << " exceeds budget " << budget;
    summary.assertions.push_back(os.str());
    return false;
  }
  return true;
}

void run_pairwise_sync(const ExperimentConfig& config, const fs::path& out, int workers,
                       RunSummary& summary) {
  const TimeGrid grid = config.grid();
  const SystemSpec sys = config.system();
  const double L = sys.dissipativity();
  const double slack = config.tolerances.at("envelope_slack");
  const bool deterministic = sys.coeffs.isZero(0.0);
  const int n = static_cast<int>(config.seeds.size());

  struct SeedOut {
    PairwiseGapReport report;
    ComponentGapReport comp;
    TOmegaEstimate t_omega;
    TrajectoryBundle traj;
    bool envelope_pass = false;
    bool flagged = false;
  };
  std::vector<SeedOut> results(n);

  parallel_for(n, workers, [&](int i) {
    SeedOut& r = results[i];
    NoiseGrid noise = sample_wiener(config.seeds[i], grid, sys.m);
    OUPathSet ou = build_ou_paths(noise, sys.coeffs, OuInit::stationary());
    r.t_omega = estimate_T_omega(ou, L);
    StateVector a{Frame::Rode, Eigen::MatrixXd::Ones(sys.N, sys.d)};
    StateVector b{Frame::Rode, Eigen::MatrixXd::Constant(sys.N, sys.d, -1.0)};
    TrajectoryBundle ta = integrate_rode(sys, ou, a, 0.0, grid.t_max);
    TrajectoryBundle tb = integrate_rode(sys, ou, b, 0.0, grid.t_max);
    r.flagged = ta.flagged || tb.flagged || !r.t_omega.found;
    if (r.flagged) return;
    r.report = pairwise_gap(ta, tb, std::max(r.t_omega.value, 0.0));
    r.comp = component_gap(ta, 0.0, grid.t_max);
    r.traj = std::move(ta);
    r.envelope_pass = contraction_envelope(r.report, L, r.t_omega.value, slack).pass;
  });

  int flagged = 0, envelope_ok = 0, rate_ok = 0, rate_defined = 0;
  double rate_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const SeedOut& r = results[i];
    if (r.flagged) {
      ++flagged;
      continue;
    }
    if (r.envelope_pass) ++envelope_ok;
    if (r.report.rate_defined) {
      ++rate_defined;
      rate_sum += r.report.fitted_rate;
      if (r.report.fitted_rate <= config.tolerances.at("rate_max")) ++rate_ok;
    }
    fs::path gaps = out / ("gaps_seed" + std::to_string(config.seeds[i]) + ".csv");
    CsvWriter csv(gaps.string(),
                  "config=" + hash_hex(summary.config_hash) + " experiment=pairwise-sync seed=" +
                      std::to_string(config.seeds[i]),
                  {"t", "pairwise_gap", "component_gap"});
    for (size_t k = 0; k < r.report.times.size(); ++k) {
      csv.row({r.report.times[k], r.report.gap(static_cast<int>(k)),
               r.comp.gap(static_cast<int>(k))});
    }
    summary.artifacts.push_back(gaps.filename().string());
    fs::path traj = out / ("trajectory_seed" + std::to_string(config.seeds[i]) + ".csv");
    write_trajectory_csv(r.traj, traj.string(),
                         "config=" + hash_hex(summary.config_hash) +
                             " experiment=pairwise-sync seed=" +
                             std::to_string(config.seeds[i]));
    summary.artifacts.push_back(traj.filename().string());
  }

  int used = n - flagged;
  Checker check{&summary};
  if (!apply_flag_budget(summary, flagged, n, config.tolerances.at("flagged_budget"))) return;
  if (rate_defined) summary.scalars["mean_fitted_rate"] = rate_sum / rate_defined;
  if (deterministic) {
    std::ostringstream os;
    os << "pairwise-sync deterministic: fitted rate <= " << config.tolerances.at("rate_max")
       << " on all of " << seed_span(config.seeds) << " (" << rate_ok << "/" << used << ")";
    check.require(used > 0 && rate_ok == used && rate_defined == used, os.str());
  } else {
    double fraction = used ? static_cast<double>(envelope_ok) / used : 0.0;
    summary.scalars["envelope_fraction"] = fraction;
    std::ostringstream os;
    os << "pairwise-sync stochastic: e^{-L(t-T)} envelope (slack "
       << config.tolerances.at("envelope_slack") << ") on fraction " << fraction << " of "
       << seed_span(config.seeds) << ", threshold " << config.tolerances.at("envelope_fraction");
    check.require(used > 0 && fraction >= config.tolerances.at("envelope_fraction"), os.str());
  }
}

void run_pullback_attractor(const ExperimentConfig& config, const fs::path& out, int workers,
                            RunSummary& summary) {
  const TimeGrid grid = config.grid();
  const SystemSpec sys = config.system();
  const double tol = config.tolerances.at("attractor");
  const double inv_tol = config.tolerances.at("invariance");
  const double shift = config.tolerances.at("invariance_shift");
  const int n = static_cast<int>(config.seeds.size());

  struct SeedOut {
    AttractorEstimate est;
    double invariance_gap = 0.0;
    bool invariant = false;
    bool flagged = false;
  };
  std::vector<SeedOut> results(n);

  parallel_for(n, workers, [&](int i) {
    SeedOut& r = results[i];
    NoiseGrid noise = sample_wiener(config.seeds[i], grid, sys.m);
    OUPathSet ou = build_ou_paths(noise, sys.coeffs, OuInit::stationary());
    r.est = pullback_attractor(sys, ou, config.depths, tol, config.seeds[i], 0.0);
    if (r.est.flagged) {
      r.flagged = true;
      return;
    }
    // Invariance: push the time-0 estimate forward and compare against the
    // pullback estimate evaluated at the shifted time along the same path.
    AttractorEstimate shifted =
        pullback_attractor(sys, ou, config.depths, tol, config.seeds[i], shift);
    StateVector x0{Frame::Rode, r.est.value};
    TrajectoryBundle forward = integrate_rode(sys, ou, x0, 0.0, shift);
    r.flagged = shifted.flagged || forward.flagged;
    if (r.flagged) return;
    r.invariance_gap = max_row_norm_diff(forward.back(), shifted.value);
    r.invariant = r.invariance_gap <= inv_tol;
  });

  fs::path attr = out / "attractor.csv";
  std::vector<std::string> cols = {"seed", "nu", "depth", "cauchy_gap", "init_gap",
                                   "invariance_gap"};
  for (int j = 0; j < sys.N; ++j)
    for (int c = 0; c < sys.d; ++c)
      cols.push_back("x" + std::to_string(j) + "_" + std::to_string(c));
  CsvWriter csv(attr.string(),
                "config=" + hash_hex(summary.config_hash) + " experiment=pullback-attractor",
                cols);
  int flagged = 0, ok = 0;
  for (int i = 0; i < n; ++i) {
    const SeedOut& r = results[i];
    if (r.flagged) {
      ++flagged;
      continue;
    }
    if (r.est.converged && r.invariant) ++ok;
    std::vector<double> row = {static_cast<double>(config.seeds[i]), sys.nu,
                               config.depths.back(), r.est.cauchy_gap,
                               r.est.initial_state_gap, r.invariance_gap};
    for (int j = 0; j < sys.N; ++j)
      for (int c = 0; c < sys.d; ++c) row.push_back(r.est.value(j, c));
    csv.row(row);
  }
  summary.artifacts.push_back("attractor.csv");

  int used = n - flagged;
  Checker check{&summary};
  if (!apply_flag_budget(summary, flagged, n, config.tolerances.at("flagged_budget"))) return;
  double fraction = used ? static_cast<double>(ok) / used : 0.0;
  summary.scalars["singleton_fraction"] = fraction;
  std::ostringstream os;
  os << "pullback-attractor: singleton (tol " << tol << ") and invariance (tol " << inv_tol
     << ") on fraction " << fraction << " of " << seed_span(config.seeds) << ", threshold "
     << config.tolerances.at("attractor_fraction");
  check.require(used > 0 && fraction >= config.tolerances.at("attractor_fraction"), os.str());
}

void run_nu_sweep(const ExperimentConfig& config, const fs::path& out, int workers,
                  RunSummary& summary) {
  const TimeGrid grid = config.grid();
  const SystemSpec sys = config.system();
  const int n = static_cast<int>(config.seeds.size());

  std::vector<NuSweepResult> results(n);
  parallel_for(n, workers, [&](int i) {
    NoiseGrid noise = sample_wiener(config.seeds[i], grid, sys.m);
    OUPathSet ou = build_ou_paths(noise, sys.coeffs, OuInit::stationary());
    results[i] = nu_sweep(sys, ou, config.nus, config.window_t0, config.window_t1,
                          Eigen::MatrixXd::Ones(sys.N, sys.d));
  });

  fs::path sweep = out / "sweep.csv";
  CsvWriter csv(sweep.string(),
                "config=" + hash_hex(summary.config_hash) + " experiment=nu-sweep",
                {"seed", "nu", "sup_gap", "slope", "m_bound"});
  int flagged = 0, decreasing_ok = 0, slope_ok = 0;
  for (int i = 0; i < n; ++i) {
    const NuSweepResult& r = results[i];
    if (r.flagged) {
      ++flagged;
      continue;
    }
    bool decreasing = true;
    for (size_t k = 1; k < r.sup_gaps.size(); ++k) {
      if (!(r.sup_gaps[k] < r.sup_gaps[k - 1])) decreasing = false;
    }
    if (decreasing) ++decreasing_ok;
    double lo = config.tolerances.at("slope_center") - config.tolerances.at("slope_band");
    double hi = config.tolerances.at("slope_center") + config.tolerances.at("slope_band");
    if (r.slope_defined && r.slope >= lo && r.slope <= hi) ++slope_ok;
    for (size_t k = 0; k < r.nus.size(); ++k) {
      csv.row({static_cast<double>(config.seeds[i]), r.nus[k], r.sup_gaps[k], r.slope,
               r.m_bounds[k]});
    }
  }
  summary.artifacts.push_back("sweep.csv");

  int used = n - flagged;
  Checker check{&summary};
  if (!apply_flag_budget(summary, flagged, n, config.tolerances.at("flagged_budget"))) return;
  summary.scalars["decreasing_seeds"] = decreasing_ok;
  summary.scalars["slope_in_band_seeds"] = slope_ok;
  {
    std::ostringstream os;
    os << "nu-sweep: sup-window gap strictly decreasing in nu on all of "
       << seed_span(config.seeds) << " (" << decreasing_ok << "/" << used << ")";
    check.require(used > 0 && decreasing_ok == used, os.str());
  }
  {
    std::ostringstream os;
    os << "nu-sweep: log-log slope within " << config.tolerances.at("slope_center") << " +/- "
       << config.tolerances.at("slope_band") << " on all of " << seed_span(config.seeds) << " ("
       << slope_ok << "/" << used << ")";
    check.require(used > 0 && slope_ok == used, os.str());
  }
}

void run_averaged_convergence(const ExperimentConfig& config, const fs::path& out, int workers,
                              RunSummary& summary) {
  const TimeGrid grid = config.grid();
  const SystemSpec sys = config.system();
  const int n = static_cast<int>(config.seeds.size());

  std::vector<AveragedComparisonResult> results(n);
  parallel_for(n, workers, [&](int i) {
    NoiseGrid noise = sample_wiener(config.seeds[i], grid, sys.m);
    OUPathSet ou = build_ou_paths(noise, sys.coeffs, OuInit::stationary());
    results[i] = averaged_comparison(sys, ou, config.nus, config.window_t0, config.window_t1,
                                     config.depths, config.tolerances.at("attractor"),
                                     config.seeds[i]);
  });

  fs::path avg = out / "averaged.csv";
  CsvWriter csv(avg.string(),
                "config=" + hash_hex(summary.config_hash) + " experiment=averaged-convergence",
                {"seed", "nu", "sup_distance", "mean_projection_gap"});
  int flagged = 0, decreasing_ok = 0, singleton_ok = 0;
  for (int i = 0; i < n; ++i) {
    const AveragedComparisonResult& r = results[i];
    if (r.flagged) {
      ++flagged;
      continue;
    }
    bool decreasing = true;
    for (size_t k = 1; k < r.sup_distances.size(); ++k) {
      if (!(r.sup_distances[k] < r.sup_distances[k - 1])) decreasing = false;
    }
    if (decreasing) ++decreasing_ok;
    if (r.averaged_attractor.converged) ++singleton_ok;
    for (size_t k = 0; k < r.nus.size(); ++k) {
      csv.row({static_cast<double>(config.seeds[i]), r.nus[k], r.sup_distances[k],
               r.mean_projection_gaps[k]});
    }
  }
  summary.artifacts.push_back("averaged.csv");

  int used = n - flagged;
  Checker check{&summary};
  if (!apply_flag_budget(summary, flagged, n, config.tolerances.at("flagged_budget"))) return;
  double fraction = used ? static_cast<double>(decreasing_ok) / used : 0.0;
  summary.scalars["decreasing_fraction"] = fraction;
  {
    std::ostringstream os;
    os << "averaged-convergence: distance to averaged trajectory decreasing in nu on fraction "
       << fraction << " of " << seed_span(config.seeds) << ", threshold "
       << config.tolerances.at("decrease_fraction");
    check.require(used > 0 && fraction >= config.tolerances.at("decrease_fraction"), os.str());
  }
  double singleton_fraction = used ? static_cast<double>(singleton_ok) / used : 0.0;
  summary.scalars["averaged_singleton_fraction"] = singleton_fraction;
  {
    std::ostringstream os;
    os << "averaged-convergence: averaged attractor singleton (tol "
       << config.tolerances.at("attractor") << ") on fraction " << singleton_fraction << " of "
       << seed_span(config.seeds) << ", threshold " << config.tolerances.at("attractor_fraction");
    check.require(used > 0 && singleton_fraction >= config.tolerances.at("attractor_fraction"),
                  os.str());
  }
}

void run_conjugacy_check(const ExperimentConfig& config, const fs::path& out, int workers,
                         RunSummary& summary) {
  const TimeGrid grid = config.grid();
  const SystemSpec sys = config.system();
  const double horizon = std::min(config.window_t1, grid.t_max);
  const int n = static_cast<int>(config.seeds.size());

  struct SeedOut {
    double rel_sup_gap = 0.0;
    bool flagged = false;
  };
  std::vector<SeedOut> results(n);

  parallel_for(n, workers, [&](int i) {
    SeedOut& r = results[i];
    NoiseGrid noise = sample_wiener(config.seeds[i], grid, sys.m);
    OUPathSet ou = build_ou_paths(noise, sys.coeffs, OuInit::stationary());
    StateVector x0{Frame::Rode, Eigen::MatrixXd::Ones(sys.N, sys.d)};
    TrajectoryBundle rode = integrate_rode(sys, ou, x0, 0.0, horizon);
    StateVector X0 = frame_convert(x0, ou.values.col(ou.grid.zero_index()), Frame::Sode);
    TrajectoryBundle sode = integrate_sode_stratonovich(sys, noise, ou, X0, 0.0, horizon);
    if (rode.flagged || sode.flagged) {
      r.flagged = true;
      return;
    }
    TrajectoryBundle converted = convert_trajectory(rode, ou, Frame::Sode);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < sode.nodes(); ++k) {
      num = std::max(num, max_row_norm_diff(converted.states[k], sode.states[k]));
      den = std::max(den, sode.states[k].rowwise().norm().maxCoeff());
    }
    r.rel_sup_gap = num / std::max(den, 1e-300);
  });

  fs::path conj = out / "conjugacy.csv";
  CsvWriter csv(conj.string(),
                "config=" + hash_hex(summary.config_hash) + " experiment=conjugacy-check",
                {"seed", "rel_sup_gap"});
  int flagged = 0, ok = 0;
  for (int i = 0; i < n; ++i) {
    if (results[i].flagged) {
      ++flagged;
      continue;
    }
    if (results[i].rel_sup_gap <= config.tolerances.at("conjugacy")) ++ok;
    csv.row({static_cast<double>(config.seeds[i]), results[i].rel_sup_gap});
  }
  summary.artifacts.push_back("conjugacy.csv");

  int used = n - flagged;
  Checker check{&summary};
  if (!apply_flag_budget(summary, flagged, n, config.tolerances.at("flagged_budget"))) return;
  double fraction = used ? static_cast<double>(ok) / used : 0.0;
  summary.scalars["conjugacy_fraction"] = fraction;
  std::ostringstream os;
  os << "conjugacy-check: relative sup-gap <= " << config.tolerances.at("conjugacy")
     << " over [0," << horizon << "] on fraction " << fraction << " of "
     << seed_span(config.seeds) << ", threshold " << config.tolerances.at("conjugacy_fraction");
  check.require(used > 0 && fraction >= config.tolerances.at("conjugacy_fraction"), os.str());
}

void run_spectral_check(const ExperimentConfig& config, const fs::path& out,
                        RunSummary& summary) {
  const int p_max = static_cast<int>(config.tolerances.at("p_max"));
  const double tol = config.tolerances.at("spectral");
  const std::vector<double> alphas = {0.0, 1.0, 1.9, 3.0};

  fs::path spectral = out / "spectral.csv";
  CsvWriter csv(spectral.string(),
                "config=" + hash_hex(summary.config_hash) + " experiment=spectral-check",
                {"p", "alpha", "max_dev"});
  double worst = 0.0;
  for (int p = 1; p <= p_max; ++p) {
    for (double alpha : alphas) {
      TridiagSpec spec{p, alpha};
      Eigen::VectorXd closed = tridiag_eigenvalues(spec);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tridiag_matrix(spec));
      double dev = (closed - solver.eigenvalues()).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      csv.row({static_cast<double>(p), alpha, dev});
    }
  }
  summary.artifacts.push_back("spectral.csv");

  bool negdef_ok = true;
  for (int p = 2; p <= p_max; ++p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        tridiag_matrix({p, alpha_threshold(p)}));
    if (solver.eigenvalues().maxCoeff() >= 0.0) negdef_ok = false;
  }

  summary.scalars["max_eigenvalue_dev"] = worst;
  Checker check{&summary};
  {
    std::ostringstream os;
    os << "spectral-check: closed-form vs dense eigensolver max dev " << worst
       << " <= " << tol << " for p <= " << p_max << ", alpha in {0,1,1.9,3}";
    check.require(worst <= tol, os.str());
  }
  {
    std::ostringstream os;
    os << "spectral-check: alpha_0(p) matrix negative definite for p in {2.." << p_max << "}";
    check.require(negdef_ok, os.str());
  }
}

}  // namespace

std::string RunSummary::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config_hash"] = hash_hex(config_hash);
  j["pass"] = pass;
  j["inconclusive"] = inconclusive;
  j["exit_code"] = exit_code();
  j["scalars"] = scalars;
  j["assertions"] = assertions;
  j["artifacts"] = artifacts;
  j["seeds"] = seeds;
  return j.dump(2);
}

RunSummary run_experiment(const ExperimentConfig& config, int workers) {
  RunSummary summary;
  summary.experiment = config.experiment;
  summary.config_hash = config_hash(config);
  summary.seeds = config.seeds;
  summary.pass = true;
  if (workers < 1) workers = 1;

  fs::path out = resolve_out_dir(config);
  fs::create_directories(out);

  if (config.experiment == "pairwise-sync") {
    run_pairwise_sync(config, out, workers, summary);
  } else if (config.experiment == "pullback-attractor") {
    run_pullback_attractor(config, out, workers, summary);
  } else if (config.experiment == "nu-sweep") {
    run_nu_sweep(config, out, workers, summary);
  } else if (config.experiment == "averaged-convergence") {
    run_averaged_convergence(config, out, workers, summary);
  } else if (config.experiment == "conjugacy-check") {
    run_conjugacy_check(config, out, workers, summary);
  } else if (config.experiment == "spectral-check") {
    run_spectral_check(config, out, summary);
  } else {
    throw std::invalid_argument("unknown experiment: " + config.experiment);
  }

  if (summary.inconclusive) summary.pass = false;
  std::ofstream sfile(out / "summary.json");
  sfile << summary.to_json() << "\n";
  summary.artifacts.push_back("summary.json");
  return summary;
}

}  // namespace syncsim
