#include "syncsim/sync.hpp"

#include <cmath>
#include <random>

namespace syncsim {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

Eigen::MatrixXd random_state_on_sphere(std::mt19937_64& rng, int n, int d, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
  const double norm = x.norm();
  if (norm > 0.0) x *= radius / norm;
  return x;
}

double max_row_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double gap = 0.0;
  for (int j = 0; j < a.rows(); ++j) gap = std::max(gap, (a.row(j) - b.row(j)).norm());
  return gap;
}

// Shared pullback driver; integrate(x0, t_start, t_end) -> final state or
// flagged. Initial set: the origin plus two seeded points of norm R.
template <class Integrate>
AttractorEstimate pullback_generic(Integrate&& integrate, int rows, int d, double radius,
                                   const std::vector<double>& depths, double tolerance,
                                   std::uint64_t seed, double eval_time) {
  AttractorEstimate est;
  est.pullback_depths = depths;
  if (depths.empty()) throw std::invalid_argument("pullback_attractor: need at least one depth");
  for (size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) {
      throw std::invalid_argument("pullback_attractor: depths must be increasing");
    }
  }

  std::mt19937_64 rng(derive_seed(seed, 0xa77ULL));
  std::vector<Eigen::MatrixXd> inits;
  inits.push_back(Eigen::MatrixXd::Zero(rows, d));
  inits.push_back(random_state_on_sphere(rng, rows, d, radius));
  inits.push_back(random_state_on_sphere(rng, rows, d, radius));

  Eigen::MatrixXd previous_depth_value;
  for (size_t di = 0; di < depths.size(); ++di) {
    std::vector<Eigen::MatrixXd> finals;
    for (const auto& x0 : inits) {
      bool flagged = false;
      Eigen::MatrixXd value = integrate(x0, eval_time - depths[di], eval_time, flagged);
      if (flagged) {
        est.flagged = true;
        return est;
      }
      finals.push_back(std::move(value));
    }
    if (di + 1 == depths.size()) {
      est.initial_state_gap = std::max(max_row_gap(finals[0], finals[1]),
                                       std::max(max_row_gap(finals[0], finals[2]),
                                                max_row_gap(finals[1], finals[2])));
      est.value = finals[0];
      if (depths.size() > 1) est.cauchy_gap = max_row_gap(finals[0], previous_depth_value);
    } else if (di + 2 == depths.size()) {
      previous_depth_value = finals[0];
    }
  }
  est.converged = est.cauchy_gap <= tolerance && est.initial_state_gap <= tolerance;
  return est;
}

}  // namespace

AttractorEstimate pullback_attractor(const SystemSpec& spec, const OUPathSet& ou,
                                     const std::vector<double>& depths, double tolerance,
                                     std::uint64_t seed, double eval_time) {
  if (depths.empty()) throw std::invalid_argument("pullback_attractor: need at least one depth");
  const double max_depth = depths.back();
  const double truncation = std::min(max_depth, eval_time - ou.grid.t_min);
  const double radius = absorbing_radius(spec, ou, truncation);
  auto integrate = [&](const Eigen::MatrixXd& x0, double t0, double t1, bool& flagged) {
    StateVector state{Frame::Rode, x0};
    TrajectoryBundle traj = integrate_rode(spec, ou, state, t0, t1);
    flagged = traj.flagged;
    return traj.flagged ? Eigen::MatrixXd() : traj.back();
  };
  return pullback_generic(integrate, spec.N, spec.d, radius, depths, tolerance, seed,
                          eval_time);
}

AttractorEstimate averaged_pullback_attractor(const SystemSpec& spec, const OUPathSet& ou,
                                              const std::vector<double>& depths,
                                              double tolerance, std::uint64_t seed,
                                              double eval_time) {
  if (depths.empty()) throw std::invalid_argument("pullback_attractor: need at least one depth");
  const double max_depth = depths.back();
  const double truncation = std::min(max_depth, eval_time - ou.grid.t_min);
  const double radius = absorbing_radius(spec, ou, truncation);
  auto integrate = [&](const Eigen::MatrixXd& z0, double t0, double t1, bool& flagged) {
    TrajectoryBundle traj = integrate_averaged_rode(spec, ou, z0.row(0).transpose(), t0, t1);
    flagged = traj.flagged;
    return traj.flagged ? Eigen::MatrixXd() : traj.back();
  };
  return pullback_generic(integrate, 1, spec.d, radius, depths, tolerance, seed, eval_time);
}

double absorbing_radius(const SystemSpec& spec, const OUPathSet& ou, double truncation_T) {
  const double L = spec.dissipativity();
  if (!(L > 0.0)) throw std::invalid_argument("absorbing_radius: need L > 0");
  const TimeGrid& g = ou.grid;
  const int k_end = g.zero_index();
  const int k_start = g.index_of(-truncation_T);
  const int n = k_end - k_start;

  const CouplingMatrixSeries series =
      CouplingMatrixSeries::build(ou, L, spec.nu, CouplingVariant::Absorbing);

  // S[i] = int_{t_{k_start}}^{t_{k_start + i}} A~ by trapezoid.
  std::vector<Eigen::MatrixXd> S(static_cast<size_t>(n) + 1);
  S[0] = Eigen::MatrixXd::Zero(spec.N, spec.N);
  for (int i = 1; i <= n; ++i) {
    S[i] = S[i - 1] +
           0.5 * g.h * (series.matrix_at(k_start + i - 1) + series.matrix_at(k_start + i));
  }

  auto f_tilde = [&](int k) {
    Eigen::VectorXd f(spec.N);
    for (int j = 0; j < spec.N; ++j) {
      f(j) = std::exp(-2.0 * ou.values(j, k)) * spec.drifts[j].at_zero().squaredNorm() / L;
    }
    return f;
  };

  const std::vector<double> w = composite_weights(n, g.h);
  Eigen::VectorXd C = Eigen::VectorXd::Zero(spec.N);
  for (int i = 0; i <= n; ++i) {
    if (w[i] == 0.0) continue;
    C += w[i] * symmetric_expm_apply(S[n] - S[i], f_tilde(k_start + i));
  }
  return std::sqrt(1.0 + C.squaredNorm());
}

PairwiseGapReport pairwise_gap(const TrajectoryBundle& a, const TrajectoryBundle& b,
                               double fit_start_time) {
  if (a.nodes() != b.nodes() || a.start_index != b.start_index || a.frame != b.frame) {
    throw std::invalid_argument("pairwise_gap: mismatched trajectory bundles");
  }
  PairwiseGapReport report;
  const int n = a.nodes();
  report.times.resize(static_cast<size_t>(n));
  report.gap.resize(n);
  report.sq_vector_norm.resize(n);
  for (int k = 0; k < n; ++k) {
    report.times[static_cast<size_t>(k)] = a.time_at(k);
    const Eigen::MatrixXd& xa = a.states[static_cast<size_t>(k)];
    const Eigen::MatrixXd& xb = b.states[static_cast<size_t>(k)];
    double gap = 0.0, sq = 0.0;
    for (int j = 0; j < xa.rows(); ++j) {
      const double row_sq = (xa.row(j) - xb.row(j)).squaredNorm();
      gap = std::max(gap, std::sqrt(row_sq));
      sq += row_sq * row_sq;
    }
    report.gap(k) = gap;
    report.sq_vector_norm(k) = std::sqrt(sq);
  }

  // OLS fit on log gap; start at max(fit_start_time, first node where the gap
  // dropped below a tenth of its initial value), stop at the 1e-12 floor.
  const double initial = report.gap(0);
  if (initial > 0.0) {
    std::vector<double> ts, logs;
    bool fitting = false;
    for (int k = 0; k < n; ++k) {
      const double t = report.times[static_cast<size_t>(k)];
      const double gap = report.gap(k);
      if (!fitting && (t >= fit_start_time || gap < 0.1 * initial)) fitting = true;
      if (!fitting) continue;
      if (gap < 1e-12) break;
      ts.push_back(t);
      logs.push_back(std::log(gap));
    }
    if (ts.size() >= 2) {
      report.fitted_rate = ols_slope(ts, logs);
      report.rate_defined = true;
    }
  }
  return report;
}

EnvelopeCheck contraction_envelope(const PairwiseGapReport& report, double L, double T,
                                   double slack) {
  EnvelopeCheck check;
  int anchor = -1;
  for (size_t k = 0; k < report.times.size(); ++k) {
    if (report.times[k] >= T) {
      anchor = static_cast<int>(k);
      break;
    }
  }
  if (anchor < 0) return check;
  const double s0 = report.sq_vector_norm(anchor);
  if (s0 <= 0.0) return check;
  const double t0 = report.times[static_cast<size_t>(anchor)];
  for (size_t k = static_cast<size_t>(anchor); k < report.times.size(); ++k) {
    const double s = report.sq_vector_norm(static_cast<int>(k));
    if (s < 1e-24) break;  // integrator floor
    const double allowed = (1.0 + slack) * s0 * std::exp(-L * (report.times[k] - t0));
    const double excess = std::log(s) - std::log(allowed);
    if (excess > check.max_log_excess) check.max_log_excess = excess;
    if (s > allowed) check.pass = false;
  }
  return check;
}

ComponentGapReport component_gap(const TrajectoryBundle& traj, double window_t0,
                                 double window_t1) {
  ComponentGapReport report;
  const int n = traj.nodes();
  report.times.resize(static_cast<size_t>(n));
  report.gap.resize(n);
  int in_window = 0;
  for (int k = 0; k < n; ++k) {
    const double t = traj.time_at(k);
    report.times[static_cast<size_t>(k)] = t;
    const Eigen::MatrixXd& x = traj.states[static_cast<size_t>(k)];
    double gap = 0.0;
    for (int i = 0; i < x.rows(); ++i)
      for (int j = i + 1; j < x.rows(); ++j)
        gap = std::max(gap, (x.row(i) - x.row(j)).norm());
    report.gap(k) = gap;
    if (t >= window_t0 && t <= window_t1) {
      report.sup_window = std::max(report.sup_window, gap);
      ++in_window;
    }
  }
  if (in_window < 10) {
    throw std::invalid_argument("component_gap: window must contain at least 10 grid nodes");
  }
  return report;
}

namespace {

double m_bound_diagnostic(const SystemSpec& spec, const TrajectoryBundle& traj,
                          const OUPathSet& ou, int comp_k, int comp_l, double beta,
                          double w0, double w1) {
  auto component_sup = [&](int j) {
    double sup = 0.0;
    for (int n = 0; n < traj.nodes(); ++n) {
      const double t = traj.time_at(n);
      if (t < w0 || t > w1) continue;
      const double o = ou.values(j, traj.start_index + n);
      const Eigen::VectorXd x = traj.states[static_cast<size_t>(n)].row(j).transpose();
      const double fval = spec.drifts[j].eval(std::exp(o) * x).squaredNorm();
      const double term =
          (4.0 / beta) * (std::exp(-2.0 * o) * fval + o * o * x.squaredNorm());
      sup = std::max(sup, term);
    }
    return sup;
  };
  return component_sup(comp_k) + component_sup(comp_l);
}

}  // namespace

NuSweepResult nu_sweep(const SystemSpec& spec_template, const OUPathSet& ou,
                       const std::vector<double>& nus, double window_t0, double window_t1,
                       const Eigen::MatrixXd& x0) {
  NuSweepResult result;
  for (size_t i = 1; i < nus.size(); ++i) {
    if (nus[i] <= nus[i - 1]) throw std::invalid_argument("nu_sweep: nus must be ascending");
  }
  for (double nu : nus) {
    if (nu < 1.0) throw std::invalid_argument("nu_sweep: each nu must be >= 1");
  }
  for (double nu : nus) {
    SystemSpec spec = spec_template;
    spec.nu = nu;
    StateVector state{Frame::Rode, x0};
    TrajectoryBundle traj = integrate_rode(spec, ou, state, 0.0, window_t1);
    if (traj.flagged) {
      result.flagged = true;
      return result;
    }
    const ComponentGapReport gap = component_gap(traj, window_t0, window_t1);
    result.nus.push_back(nu);
    result.sup_gaps.push_back(gap.sup_window);
    result.m_bounds.push_back(
        m_bound_diagnostic(spec, traj, ou, 0, 1, 1.0, window_t0, window_t1));
  }
  std::vector<double> log_nu, log_gap;
  for (size_t i = 0; i < result.nus.size(); ++i) {
    if (result.sup_gaps[i] > 0.0) {
      log_nu.push_back(std::log(result.nus[i]));
      log_gap.push_back(std::log(result.sup_gaps[i]));
    }
  }
  if (log_nu.size() >= 2) {
    result.slope = ols_slope(log_nu, log_gap);
    result.slope_defined = true;
  }
  return result;
}

AveragedComparisonResult averaged_comparison(const SystemSpec& spec_template,
                                             const OUPathSet& ou,
                                             const std::vector<double>& nus,
                                             double window_t0, double window_t1,
                                             const std::vector<double>& depths,
                                             double tolerance, std::uint64_t seed) {
  AveragedComparisonResult result;
  result.averaged_attractor =
      averaged_pullback_attractor(spec_template, ou, depths, tolerance, seed);
  if (result.averaged_attractor.flagged) {
    result.flagged = true;
    return result;
  }
  const TrajectoryBundle z_traj = integrate_averaged_rode(
      spec_template, ou, result.averaged_attractor.value.row(0).transpose(), 0.0, window_t1);
  if (z_traj.flagged) {
    result.flagged = true;
    return result;
  }

  for (double nu : nus) {
    SystemSpec spec = spec_template;
    spec.nu = nu;
    const AttractorEstimate attractor = pullback_attractor(spec, ou, depths, tolerance, seed);
    if (attractor.flagged) {
      result.flagged = true;
      return result;
    }
    StateVector state{Frame::Rode, attractor.value};
    const TrajectoryBundle traj = integrate_rode(spec, ou, state, 0.0, window_t1);
    if (traj.flagged) {
      result.flagged = true;
      return result;
    }
    double sup_dist = 0.0, sup_mean = 0.0;
    for (int n = 0; n < traj.nodes(); ++n) {
      const double t = traj.time_at(n);
      if (t < window_t0 || t > window_t1) continue;
      const Eigen::MatrixXd& x = traj.states[static_cast<size_t>(n)];
      const Eigen::RowVectorXd z = z_traj.states[static_cast<size_t>(n)].row(0);
      for (int j = 0; j < x.rows(); ++j) {
        sup_dist = std::max(sup_dist, (x.row(j) - z).norm());
      }
      sup_mean = std::max(sup_mean, (x.colwise().mean() - z).norm());
    }
    result.nus.push_back(nu);
    result.sup_distances.push_back(sup_dist);
    result.mean_projection_gaps.push_back(sup_mean);
  }
  return result;
}

}  // namespace syncsim
