#include "syncsim/ou.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

#include "syncsim/csv.hpp"

namespace syncsim {

OUPathSet build_ou_paths(const NoiseGrid& noise, const Eigen::MatrixXd& coeffs,
                         const OuInit& init) {
  const int n_sys = static_cast<int>(coeffs.rows());
  if (n_sys < 1) throw std::invalid_argument("build_ou_paths: need at least one coefficient row");
  if (coeffs.cols() != noise.drivers()) {
    throw std::invalid_argument("build_ou_paths: coefficient columns != driver count");
  }
  const TimeGrid& g = noise.grid;

  OUPathSet ou;
  ou.grid = g;
  ou.coeffs = coeffs;
  ou.values.resize(n_sys, g.n_points);

  Eigen::VectorXd start(n_sys);
  if (init.kind == OuInit::Kind::Explicit) {
    if (init.values.size() != n_sys) {
      throw std::invalid_argument("build_ou_paths: explicit init size != N");
    }
    start = init.values;
  } else {
    // O_0 = C g / sqrt(2), g standard normal, gives Cov = (1/2) C C^T exactly.
    std::mt19937_64 rng(derive_seed(noise.seed, 0x05eedULL));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd gauss(noise.drivers());
    for (int i = 0; i < gauss.size(); ++i) gauss(i) = normal(rng);
    start = coeffs * gauss / std::sqrt(2.0);
  }

  const double decay = std::exp(-g.h);
  ou.values.col(0) = start;
  for (int k = 0; k + 1 < g.n_points; ++k) {
    ou.values.col(k + 1) = decay * ou.values.col(k) + coeffs * noise.increments.col(k);
  }
  return ou;
}

Eigen::VectorXd ou_cumulative_integral(const OUPathSet& ou, int j) {
  const TimeGrid& g = ou.grid;
  const int k0 = g.straddles_zero() ? g.zero_index() : 0;
  Eigen::VectorXd acc(g.n_points);
  acc(k0) = 0.0;
  for (int k = k0 + 1; k < g.n_points; ++k) {
    acc(k) = acc(k - 1) + 0.5 * g.h * (ou.values(j, k - 1) + ou.values(j, k));
  }
  for (int k = k0 - 1; k >= 0; --k) {
    acc(k) = acc(k + 1) - 0.5 * g.h * (ou.values(j, k) + ou.values(j, k + 1));
  }
  return acc;
}

double ergodic_average(const OUPathSet& ou, int j, double t) {
  if (t == 0.0) throw std::invalid_argument("ergodic_average: t must be nonzero");
  const int k = ou.grid.index_of(t);
  const Eigen::VectorXd acc = ou_cumulative_integral(ou, j);
  return acc(k) / t;
}

TOmegaEstimate estimate_T_omega(const OUPathSet& ou, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("estimate_T_omega: L must be positive");
  const TimeGrid& g = ou.grid;
  if (!(g.t_min < 0.0 && g.t_max > 0.0)) {
    throw std::invalid_argument("estimate_T_omega: grid must span both signs of time");
  }
  const int k0 = g.zero_index();
  const double quarter = L / 4.0;

  double worst = 0.0;  // largest |t| at which a condition is violated
  for (int j = 0; j < ou.systems(); ++j) {
    const Eigen::VectorXd acc = ou_cumulative_integral(ou, j);
    for (int k = k0 + 1; k < g.n_points; ++k) {
      const double t = g.time_at(k);
      if (acc(k) > quarter * t) worst = std::max(worst, t);
    }
    for (int k = 0; k < k0; ++k) {
      const double s = g.time_at(k);  // s < 0; condition: int_s^0 O <= -(L/4) s
      if (-acc(k) > -quarter * s) worst = std::max(worst, -s);
    }
  }

  TOmegaEstimate est;
  const double limit = std::min(g.t_max, -g.t_min);
  if (worst < limit) {
    est.value = worst;
    est.found = true;
  } else {
    est.value = g.t_max;
    est.found = false;
  }
  return est;
}

void write_paths_csv(const NoiseGrid& noise, const OUPathSet& ou,
                     const std::string& path, const std::string& header) {
  const TimeGrid& g = noise.grid;
  if (ou.grid.n_points != g.n_points || ou.grid.t_min != g.t_min || ou.grid.h != g.h) {
    throw std::invalid_argument("write_paths_csv: noise and OU grids differ");
  }
  std::vector<std::string> columns = {"t"};
  for (int i = 1; i <= noise.drivers(); ++i) columns.push_back("W_" + std::to_string(i));
  for (int j = 1; j <= ou.systems(); ++j) columns.push_back("O_" + std::to_string(j));

  const Eigen::MatrixXd wiener = noise.wiener_path();
  CsvWriter csv(path, header, columns);
  std::vector<double> row(columns.size());
  for (int k = 0; k < g.n_points; ++k) {
    row[0] = g.time_at(k);
    for (int i = 0; i < noise.drivers(); ++i) row[static_cast<size_t>(1 + i)] = wiener(i, k);
    for (int j = 0; j < ou.systems(); ++j) {
      row[static_cast<size_t>(1 + noise.drivers() + j)] = ou.values(j, k);
    }
    csv.row(row);
  }
}

}  // namespace syncsim
