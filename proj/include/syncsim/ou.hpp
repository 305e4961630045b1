#ifndef SYNCSIM_OU_HPP
#define SYNCSIM_OU_HPP

#include <Eigen/Core>

#include "syncsim/noise.hpp"

namespace syncsim {

/// N stationary Ornstein-Uhlenbeck paths built from one shared NoiseGrid.
/// Row j holds O^{(j)}(t_k); rows sharing nonzero coefficients on the same
/// driver are correlated through the shared increments.
struct OUPathSet {
  TimeGrid grid;
  Eigen::MatrixXd values;  // N x n_points
  Eigen::MatrixXd coeffs;  // N x m

  int systems() const { return static_cast<int>(values.rows()); }
};

struct OuInit {
  enum class Kind { StationarySample, Explicit };
  Kind kind = Kind::StationarySample;
  Eigen::VectorXd values;  // used when kind == Explicit

  static OuInit stationary() { return {}; }
  static OuInit explicit_values(Eigen::VectorXd v) {
    OuInit init;
    init.kind = Kind::Explicit;
    init.values = std::move(v);
    return init;
  }
};

/// Exponential-Euler recursion O_{k+1} = e^{-h} O_k + sum_i c_i dW_k^{(i)}.
/// Stationary initialization samples the joint Gaussian with covariance
/// (1/2) C C^T at the grid start.
OUPathSet build_ou_paths(const NoiseGrid& noise, const Eigen::MatrixXd& coeffs,
                         const OuInit& init);

/// Trapezoidal (1/t) * integral of O^{(j)} over [0, t] (t of either sign).
double ergodic_average(const OUPathSet& ou, int j, double t);

struct TOmegaEstimate {
  double value = 0.0;
  bool found = false;
};

/// Smallest grid time T >= 0 such that for every grid t > T, s < -T and every
/// j: int_0^t O^{(j)} <= (L/4) t and int_s^0 O^{(j)} <= -(L/4) s. Returns the
/// t_max sentinel with found = false when no such T exists within the grid.
TOmegaEstimate estimate_T_omega(const OUPathSet& ou, double L);

/// Trapezoidal cumulative integral of row j from the zero node: out[k] is
/// int_0^{t_k} O^{(j)} (negative times give the signed integral).
Eigen::VectorXd ou_cumulative_integral(const OUPathSet& ou, int j);

/// Driver and OU paths as CSV: columns t, W_1..W_m, O_1..O_N, 12 significant
/// digits, '#' provenance header. Both arguments must share the grid.
void write_paths_csv(const NoiseGrid& noise, const OUPathSet& ou,
                     const std::string& path, const std::string& header);

}  // namespace syncsim

#endif
