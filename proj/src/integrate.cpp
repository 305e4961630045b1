#include "syncsim/integrate.hpp"

#include <cmath>

#include "syncsim/csv.hpp"

namespace syncsim {

namespace {

bool finite(const Eigen::MatrixXd& x) { return x.allFinite(); }

// Shared Heun driver: rhs(node_index, state) -> state derivative.
template <class Rhs>
TrajectoryBundle heun(const TimeGrid& grid, Rhs&& rhs, const Eigen::MatrixXd& x0,
                      int i0, int i1) {
  TrajectoryBundle traj;
  traj.grid = grid;
  traj.start_index = i0;
  traj.states.reserve(static_cast<size_t>(i1 - i0) + 1);
  traj.states.push_back(x0);
  const double h = grid.h;
  try {
    for (int k = i0; k < i1; ++k) {
      const Eigen::MatrixXd& x = traj.states.back();
      const Eigen::MatrixXd slope = rhs(k, x);
      const Eigen::MatrixXd predictor = x + h * slope;
      Eigen::MatrixXd next = x + 0.5 * h * (slope + rhs(k + 1, predictor));
      if (!finite(next)) {
        traj.flagged = true;
        break;
      }
      traj.states.push_back(std::move(next));
    }
  } catch (const NumericRangeError&) {
    traj.flagged = true;
  }
  return traj;
}

void check_window(const TimeGrid& grid, double t0, double t1, int& i0, int& i1) {
  i0 = grid.index_of(t0);
  i1 = grid.index_of(t1);
  if (i0 > i1) throw std::invalid_argument("integration window: t0 must be <= t1");
}

}  // namespace

TrajectoryBundle integrate_rode(const SystemSpec& spec, const OUPathSet& ou,
                                const StateVector& x0, double t0, double t1) {
  if (x0.frame != Frame::Rode) throw std::invalid_argument("integrate_rode: state must be RODE-frame");
  if (!finite(x0.components)) throw std::invalid_argument("integrate_rode: non-finite initial state");
  int i0 = 0, i1 = 0;
  check_window(ou.grid, t0, t1, i0, i1);
  auto rhs = [&](int k, const Eigen::MatrixXd& x) {
    return coupled_rode_rhs(spec, x, ou.values.col(k));
  };
  TrajectoryBundle traj = heun(ou.grid, rhs, x0.components, i0, i1);
  traj.frame = Frame::Rode;
  return traj;
}

TrajectoryBundle integrate_sode_stratonovich(const SystemSpec& spec, const NoiseGrid& noise,
                                             const OUPathSet& ou, const StateVector& X0,
                                             double t0, double t1) {
  if (X0.frame != Frame::Sode) {
    throw std::invalid_argument("integrate_sode_stratonovich: state must be SODE-frame");
  }
  if (!finite(X0.components)) {
    throw std::invalid_argument("integrate_sode_stratonovich: non-finite initial state");
  }
  int i0 = 0, i1 = 0;
  check_window(noise.grid, t0, t1, i0, i1);
  const double h = noise.grid.h;

  // Diffusion b_i(X)^{(j)} = c_i^{(j)} X^{(j)}; applied increment-weighted.
  auto diffusion = [&](const Eigen::MatrixXd& x, int k) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(spec.N, spec.d);
    for (int j = 0; j < spec.N; ++j) {
      double factor = 0.0;
      for (int i = 0; i < spec.m; ++i) factor += spec.coeffs(j, i) * noise.increments(i, k);
      out.row(j) = factor * x.row(j);
    }
    return out;
  };

  TrajectoryBundle traj;
  traj.grid = noise.grid;
  traj.start_index = i0;
  traj.frame = Frame::Sode;
  traj.states.reserve(static_cast<size_t>(i1 - i0) + 1);
  traj.states.push_back(X0.components);
  try {
    for (int k = i0; k < i1; ++k) {
      const Eigen::MatrixXd& x = traj.states.back();
      const Eigen::MatrixXd drift0 = coupled_sode_drift(spec, x, ou.values.col(k));
      const Eigen::MatrixXd diff0 = diffusion(x, k);
      const Eigen::MatrixXd predictor = x + h * drift0 + diff0;
      const Eigen::MatrixXd drift1 = coupled_sode_drift(spec, predictor, ou.values.col(k + 1));
      const Eigen::MatrixXd diff1 = diffusion(predictor, k);
      Eigen::MatrixXd next = x + 0.5 * h * (drift0 + drift1) + 0.5 * (diff0 + diff1);
      if (!finite(next)) {
        traj.flagged = true;
        break;
      }
      traj.states.push_back(std::move(next));
    }
  } catch (const NumericRangeError&) {
    traj.flagged = true;
  }
  return traj;
}

TrajectoryBundle integrate_averaged_rode(const SystemSpec& spec, const OUPathSet& ou,
                                         const Eigen::VectorXd& z0, double t0, double t1) {
  int i0 = 0, i1 = 0;
  check_window(ou.grid, t0, t1, i0, i1);
  auto rhs = [&](int k, const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out(1, spec.d);
    out.row(0) = averaged_rode_rhs(spec, z.row(0).transpose(), ou.values.col(k)).transpose();
    return out;
  };
  Eigen::MatrixXd z_row(1, spec.d);
  z_row.row(0) = z0.transpose();
  TrajectoryBundle traj = heun(ou.grid, rhs, z_row, i0, i1);
  traj.frame = Frame::Rode;
  return traj;
}

TrajectoryBundle convert_trajectory(const TrajectoryBundle& traj, const OUPathSet& ou,
                                    Frame target) {
  TrajectoryBundle out = traj;
  out.frame = target;
  if (traj.frame == target) return out;
  for (int n = 0; n < traj.nodes(); ++n) {
    StateVector state{traj.frame, traj.states[static_cast<size_t>(n)]};
    out.states[static_cast<size_t>(n)] =
        frame_convert(state, ou.values.col(traj.start_index + n), target).components;
  }
  return out;
}

void write_trajectory_csv(const TrajectoryBundle& traj, const std::string& path,
                          const std::string& header) {
  const int d = traj.nodes() ? static_cast<int>(traj.states.front().cols()) : 0;
  std::vector<std::string> columns = {"t", "j"};
  for (int c = 1; c <= d; ++c) columns.push_back("x_" + std::to_string(c));

  CsvWriter csv(path, header, columns);
  std::vector<double> row(columns.size());
  for (int n = 0; n < traj.nodes(); ++n) {
    row[0] = traj.time_at(n);
    const Eigen::MatrixXd& state = traj.states[static_cast<size_t>(n)];
    for (int j = 0; j < state.rows(); ++j) {
      row[1] = static_cast<double>(j + 1);
      for (int c = 0; c < d; ++c) row[static_cast<size_t>(2 + c)] = state(j, c);
      csv.row(row);
    }
  }
}

}  // namespace syncsim
