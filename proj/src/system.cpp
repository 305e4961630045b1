#include "syncsim/system.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace syncsim {

namespace {

// e^{O} with |O| > 500 overflows downstream products well before the double
// range limit near 709.
double checked_exp(double o) {
  if (!(std::abs(o) <= 500.0)) {
    throw NumericRangeError("OU value out of exponentiable range: " + std::to_string(o));
  }
  return std::exp(o);
}

}  // namespace

SystemSpec SystemSpec::make(std::vector<DriftSpec> drifts, Eigen::MatrixXd coeffs, double nu) {
  SystemSpec spec;
  spec.N = static_cast<int>(drifts.size());
  if (spec.N < 3) throw std::invalid_argument("SystemSpec: N must be >= 3");
  if (coeffs.rows() != spec.N) throw std::invalid_argument("SystemSpec: coeffs rows != N");
  if (coeffs.cols() < 1) throw std::invalid_argument("SystemSpec: need at least one driver");
  if (!(nu > 0.0)) throw std::invalid_argument("SystemSpec: nu must be positive");
  spec.d = drifts.front().dim;
  for (const auto& drift : drifts) {
    if (drift.dim != spec.d) throw std::invalid_argument("SystemSpec: drifts must share dimension");
  }
  spec.m = static_cast<int>(coeffs.cols());
  spec.drifts = std::move(drifts);
  spec.coeffs = std::move(coeffs);
  spec.nu = nu;
  return spec;
}

double SystemSpec::dissipativity() const {
  double L = std::numeric_limits<double>::infinity();
  for (const auto& drift : drifts) L = std::min(L, drift.claimed_L);
  return L;
}

Eigen::VectorXd conjugate_rhs(const SystemSpec& spec, int j, const Eigen::VectorXd& x,
                              double ou_j) {
  const double up = checked_exp(ou_j);
  const double down = 1.0 / up;
  return down * spec.drifts[j].eval(up * x) + ou_j * x;
}

Eigen::MatrixXd coupled_rode_rhs(const SystemSpec& spec, const Eigen::MatrixXd& state,
                                 const Eigen::VectorXd& ou_values) {
  Eigen::MatrixXd rhs(spec.N, spec.d);
  for (int j = 0; j < spec.N; ++j) {
    rhs.row(j) = conjugate_rhs(spec, j, state.row(j).transpose(), ou_values(j)).transpose();
    rhs.row(j) += spec.nu * (state.row(spec.prev(j)) - 2.0 * state.row(j) + state.row(spec.next(j)));
  }
  return rhs;
}

Eigen::MatrixXd coupled_sode_drift(const SystemSpec& spec, const Eigen::MatrixXd& state,
                                   const Eigen::VectorXd& ou_values) {
  Eigen::MatrixXd rhs(spec.N, spec.d);
  for (int j = 0; j < spec.N; ++j) {
    const double rho = ou_values(j) - ou_values(spec.prev(j));
    const double varrho = ou_values(j) - ou_values(spec.next(j));
    rhs.row(j) = spec.drifts[j].eval(state.row(j).transpose()).transpose();
    rhs.row(j) += spec.nu * (checked_exp(rho) * state.row(spec.prev(j)) -
                             2.0 * state.row(j) +
                             checked_exp(varrho) * state.row(spec.next(j)));
  }
  return rhs;
}

Eigen::VectorXd averaged_rode_rhs(const SystemSpec& spec, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& ou_values) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(spec.d);
  for (int j = 0; j < spec.N; ++j) rhs += conjugate_rhs(spec, j, z, ou_values(j));
  return rhs / static_cast<double>(spec.N);
}

StateVector frame_convert(const StateVector& state, const Eigen::VectorXd& ou_values,
                          Frame target) {
  StateVector out = state;
  out.frame = target;
  if (state.frame == target) return out;
  const double sign = (target == Frame::Rode) ? -1.0 : 1.0;
  for (int j = 0; j < state.components.rows(); ++j) {
    out.components.row(j) = checked_exp(sign * ou_values(j)) * state.components.row(j);
  }
  return out;
}

}  // namespace syncsim
