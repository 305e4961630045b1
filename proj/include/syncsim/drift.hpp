#ifndef SYNCSIM_DRIFT_HPP
#define SYNCSIM_DRIFT_HPP

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace syncsim {

/// Drift families with analytically known one-sided dissipative Lipschitz
/// constants:
///   linear  f(x) = -lambda x                 L = lambda
///   cubic   f(x) = -a x - b x^3 (per comp.)  L = a
///   affine  f(x) = -lambda x + g             L = lambda (f(0) = g)
/// Custom drifts carry a claimed L that must pass the sampling check.
enum class DriftKind { Linear, Cubic, Affine, Custom };

struct DriftSpec {
  DriftKind kind = DriftKind::Linear;
  int dim = 1;
  double claimed_L = 1.0;
  double lambda = 1.0;
  double a = 1.0;
  double b = 0.0;
  Eigen::VectorXd offset;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn;

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd at_zero() const;

  static DriftSpec linear(int dim, double lambda);
  static DriftSpec cubic(int dim, double a, double b);
  static DriftSpec affine(int dim, double lambda, Eigen::VectorXd g);
  static DriftSpec custom(int dim, double claimed_L,
                          std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn);
};

struct LipschitzCheck {
  bool pass = true;
  Eigen::VectorXd witness_x1;
  Eigen::VectorXd witness_x2;
  double lhs = 0.0;  // <x1-x2, f(x1)-f(x2)>
  double rhs = 0.0;  // -L ||x1-x2||^2
};

/// Samples pairs uniformly in the radius ball and checks
/// <x1-x2, f(x1)-f(x2)> <= -L ||x1-x2||^2 up to 1e-12 ||x1-x2||^2.
LipschitzCheck verify_one_sided_lipschitz(const DriftSpec& drift, double L,
                                          int n_samples, double radius,
                                          std::uint64_t seed);

}  // namespace syncsim

#endif
