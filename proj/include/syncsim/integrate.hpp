#ifndef SYNCSIM_INTEGRATE_HPP
#define SYNCSIM_INTEGRATE_HPP

#include <vector>

#include "syncsim/ou.hpp"
#include "syncsim/system.hpp"

namespace syncsim {

/// Time-indexed states of all N components on a sub-window of the shared
/// grid. states[n] is the N x d state at node start_index + n. Runs that hit
/// a numeric-range overflow are flagged and must be excluded by consumers.
struct TrajectoryBundle {
  TimeGrid grid;
  int start_index = 0;
  Frame frame = Frame::Rode;
  std::vector<Eigen::MatrixXd> states;
  std::uint64_t seed = 0;
  bool flagged = false;

  double time_at(int n) const { return grid.time_at(start_index + n); }
  int nodes() const { return static_cast<int>(states.size()); }
  const Eigen::MatrixXd& back() const { return states.back(); }
};

/// Heun (trapezoidal predictor-corrector) for the coupled RODE over
/// [t0, t1], OU values read at grid nodes.
TrajectoryBundle integrate_rode(const SystemSpec& spec, const OUPathSet& ou,
                                const StateVector& x0, double t0, double t1);

/// Stochastic Heun (Stratonovich-consistent) for the equivalent coupled SODE,
/// reusing the same Wiener increments the OU paths were built from.
TrajectoryBundle integrate_sode_stratonovich(const SystemSpec& spec, const NoiseGrid& noise,
                                             const OUPathSet& ou, const StateVector& X0,
                                             double t0, double t1);

/// Heun for the averaged RODE; the scalar state z is stored as a 1 x d bundle.
TrajectoryBundle integrate_averaged_rode(const SystemSpec& spec, const OUPathSet& ou,
                                         const Eigen::VectorXd& z0, double t0, double t1);

/// Converts a whole RODE/SODE trajectory to the other frame node by node.
TrajectoryBundle convert_trajectory(const TrajectoryBundle& traj, const OUPathSet& ou,
                                    Frame target);

/// Trajectory as CSV: one row per (node, component), columns t, j, x_1..x_d,
/// 12 significant digits, '#' provenance header.
void write_trajectory_csv(const TrajectoryBundle& traj, const std::string& path,
                          const std::string& header);

}  // namespace syncsim

#endif
