#ifndef SYNCSIM_SYNC_HPP
#define SYNCSIM_SYNC_HPP

#include <vector>

#include "syncsim/integrate.hpp"
#include "syncsim/spectral.hpp"

namespace syncsim {

/// Pullback approximation of the singleton random attractor evaluated at
/// eval_time. converged requires both the deepest-depth Cauchy gap and the
/// spread over distinct initial states to fall below the tolerance.
struct AttractorEstimate {
  Eigen::MatrixXd value;  // N x d (1 x d for the averaged system)
  std::vector<double> pullback_depths;
  double cauchy_gap = 0.0;
  double initial_state_gap = 0.0;
  bool converged = false;
  bool flagged = false;
};

AttractorEstimate pullback_attractor(const SystemSpec& spec, const OUPathSet& ou,
                                     const std::vector<double>& depths, double tolerance,
                                     std::uint64_t seed, double eval_time = 0.0);

/// Pullback approximation for the averaged system.
AttractorEstimate averaged_pullback_attractor(const SystemSpec& spec, const OUPathSet& ou,
                                              const std::vector<double>& depths,
                                              double tolerance, std::uint64_t seed,
                                              double eval_time = 0.0);

/// Truncated absorbing radius R = sqrt(1 + ||C||^2) with
/// C = int_{-T}^0 exp(int_u^0 A~(tau) dtau) f~(u) du.
double absorbing_radius(const SystemSpec& spec, const OUPathSet& ou, double truncation_T);

struct PairwiseGapReport {
  std::vector<double> times;
  Eigen::VectorXd gap;             // per-time max_j ||x1^j - x2^j||
  Eigen::VectorXd sq_vector_norm;  // per-time || (||x1^j - x2^j||^2)_j ||
  double fitted_rate = 0.0;
  bool rate_defined = false;
};

PairwiseGapReport pairwise_gap(const TrajectoryBundle& a, const TrajectoryBundle& b,
                               double fit_start_time);

struct EnvelopeCheck {
  bool pass = true;
  double max_log_excess = 0.0;
};

/// Exponential contraction envelope on the squared-gap vector norm:
/// s(t) <= (1 + slack) e^{-L (t - T)} s(T) for all grid t >= T.
EnvelopeCheck contraction_envelope(const PairwiseGapReport& report, double L, double T,
                                   double slack);

struct ComponentGapReport {
  std::vector<double> times;
  Eigen::VectorXd gap;  // per-time max_{j,k} ||x^j - x^k||
  double sup_window = 0.0;
};

/// Windows must contain at least 10 grid nodes.
ComponentGapReport component_gap(const TrajectoryBundle& traj, double window_t0,
                                 double window_t1);

struct NuSweepResult {
  std::vector<double> nus;
  std::vector<double> sup_gaps;
  std::vector<double> m_bounds;  // M_{T1,T2}^{1,2,beta=1} diagnostics per nu
  double slope = 0.0;
  bool slope_defined = false;
  bool flagged = false;
};

/// Same seed, same initial data across all nu; isolates the coupling effect
/// pathwise.
NuSweepResult nu_sweep(const SystemSpec& spec_template, const OUPathSet& ou,
                       const std::vector<double>& nus, double window_t0, double window_t1,
                       const Eigen::MatrixXd& x0);

struct AveragedComparisonResult {
  std::vector<double> nus;
  std::vector<double> sup_distances;         // sup_window max_j ||x_nu^j(t) - z(t)||
  std::vector<double> mean_projection_gaps;  // sup_window ||mean_j x_nu^j(t) - z(t)||
  AttractorEstimate averaged_attractor;
  bool flagged = false;
};

AveragedComparisonResult averaged_comparison(const SystemSpec& spec_template,
                                             const OUPathSet& ou,
                                             const std::vector<double>& nus,
                                             double window_t0, double window_t1,
                                             const std::vector<double>& depths,
                                             double tolerance, std::uint64_t seed);

/// Ordinary least squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace syncsim

#endif
