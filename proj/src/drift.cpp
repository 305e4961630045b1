#include "syncsim/drift.hpp"

#include <random>
#include <stdexcept>

namespace syncsim {

Eigen::VectorXd DriftSpec::eval(const Eigen::VectorXd& x) const {
  if (x.size() != dim) throw std::invalid_argument("DriftSpec::eval: dimension mismatch");
  switch (kind) {
    case DriftKind::Linear:
      return -lambda * x;
    case DriftKind::Cubic:
      return -a * x - b * x.array().cube().matrix();
    case DriftKind::Affine:
      return -lambda * x + offset;
    case DriftKind::Custom:
      return fn(x);
  }
  throw std::logic_error("DriftSpec::eval: unknown kind");
}

Eigen::VectorXd DriftSpec::at_zero() const { return eval(Eigen::VectorXd::Zero(dim)); }

DriftSpec DriftSpec::linear(int dim, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("linear drift: lambda must be positive");
  DriftSpec d;
  d.kind = DriftKind::Linear;
  d.dim = dim;
  d.lambda = lambda;
  d.claimed_L = lambda;
  return d;
}

DriftSpec DriftSpec::cubic(int dim, double a, double b) {
  if (!(a > 0.0) || b < 0.0) throw std::invalid_argument("cubic drift: need a > 0, b >= 0");
  DriftSpec d;
  d.kind = DriftKind::Cubic;
  d.dim = dim;
  d.a = a;
  d.b = b;
  d.claimed_L = a;
  return d;
}

DriftSpec DriftSpec::affine(int dim, double lambda, Eigen::VectorXd g) {
  if (!(lambda > 0.0)) throw std::invalid_argument("affine drift: lambda must be positive");
  if (g.size() != dim) throw std::invalid_argument("affine drift: offset size != dim");
  DriftSpec d;
  d.kind = DriftKind::Affine;
  d.dim = dim;
  d.lambda = lambda;
  d.offset = std::move(g);
  d.claimed_L = lambda;
  return d;
}

DriftSpec DriftSpec::custom(int dim, double claimed_L,
                            std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn) {
  if (!(claimed_L > 0.0)) throw std::invalid_argument("custom drift: claimed L must be positive");
  DriftSpec d;
  d.kind = DriftKind::Custom;
  d.dim = dim;
  d.claimed_L = claimed_L;
  d.fn = std::move(fn);
  return d;
}

namespace {

Eigen::VectorXd sample_in_ball(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = normal(rng);
  const double norm = v.norm();
  if (norm == 0.0) return v;
  const double r = radius * std::pow(uniform(rng), 1.0 / dim);
  return v * (r / norm);
}

}  // namespace

LipschitzCheck verify_one_sided_lipschitz(const DriftSpec& drift, double L,
                                          int n_samples, double radius,
                                          std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("verify_one_sided_lipschitz: n_samples >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("verify_one_sided_lipschitz: radius > 0");
  std::mt19937_64 rng(seed);
  LipschitzCheck check;
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd x1 = sample_in_ball(rng, drift.dim, radius);
    const Eigen::VectorXd x2 = sample_in_ball(rng, drift.dim, radius);
    const Eigen::VectorXd delta = x1 - x2;
    const double sq = delta.squaredNorm();
    const double lhs = delta.dot(drift.eval(x1) - drift.eval(x2));
    const double rhs = -L * sq;
    if (lhs > rhs + 1e-12 * sq) {
      check.pass = false;
      check.witness_x1 = x1;
      check.witness_x2 = x2;
      check.lhs = lhs;
      check.rhs = rhs;
      return check;
    }
  }
  return check;
}

}  // namespace syncsim
