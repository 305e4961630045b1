#ifndef SYNCSIM_SYSTEM_HPP
#define SYNCSIM_SYSTEM_HPP

#include <Eigen/Core>
#include <vector>

#include "syncsim/drift.hpp"
#include "syncsim/errors.hpp"

namespace syncsim {

enum class Frame { Rode, Sode };

/// All N components of one state, one row per component.
struct StateVector {
  Frame frame = Frame::Rode;
  Eigen::MatrixXd components;  // N x d
};

/// N linearly coupled systems on a ring: component 0 is component N and
/// component N+1 is component 1.
struct SystemSpec {
  int N = 3;
  int d = 1;
  int m = 1;
  std::vector<DriftSpec> drifts;        // size N
  Eigen::MatrixXd coeffs;               // N x m
  double nu = 1.0;

  static SystemSpec make(std::vector<DriftSpec> drifts, Eigen::MatrixXd coeffs, double nu);

  /// Minimum claimed dissipativity constant over the drifts.
  double dissipativity() const;

  int prev(int j) const { return (j + N - 1) % N; }
  int next(int j) const { return (j + 1) % N; }
};

/// e^{-O_j} f^{(j)}(e^{O_j} x) + O_j x. |O_j| > 500 raises NumericRangeError.
Eigen::VectorXd conjugate_rhs(const SystemSpec& spec, int j, const Eigen::VectorXd& x,
                              double ou_j);

/// Right-hand side of the coupled RODE: per-component conjugate drift plus
/// nu times the cyclic discrete Laplacian.
Eigen::MatrixXd coupled_rode_rhs(const SystemSpec& spec, const Eigen::MatrixXd& state,
                                 const Eigen::VectorXd& ou_values);

/// Drift part of the equivalent coupled SODE; the Stratonovich noise term
/// sum_i c_i^{(j)} X^{(j)} o dW^{(i)} lives in the integrator.
Eigen::MatrixXd coupled_sode_drift(const SystemSpec& spec, const Eigen::MatrixXd& state,
                                   const Eigen::VectorXd& ou_values);

/// Averaged RODE right-hand side: the N-fold mean of the conjugate drifts.
Eigen::VectorXd averaged_rode_rhs(const SystemSpec& spec, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& ou_values);

/// Multiplies component j by e^{-O_j} (towards RODE) or e^{+O_j} (towards
/// SODE). Round trip is the identity to machine precision.
StateVector frame_convert(const StateVector& state, const Eigen::VectorXd& ou_values,
                          Frame target);

}  // namespace syncsim

#endif
