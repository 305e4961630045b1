#include "syncsim/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace syncsim {

Eigen::MatrixXd tridiag_matrix(const TridiagSpec& spec) {
  if (spec.p < 1) throw std::invalid_argument("tridiag_matrix: p must be >= 1");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(spec.p, spec.p);
  for (int i = 0; i < spec.p; ++i) {
    A(i, i) = -spec.alpha;
    if (i + 1 < spec.p) {
      A(i, i + 1) = 1.0;
      A(i + 1, i) = 1.0;
    }
  }
  return A;
}

Eigen::VectorXd tridiag_eigenvalues(const TridiagSpec& spec) {
  if (spec.p < 1) throw std::invalid_argument("tridiag_eigenvalues: p must be >= 1");
  Eigen::VectorXd eig(spec.p);
  for (int k = 1; k <= spec.p; ++k) {
    eig(k - 1) = -spec.alpha + 2.0 * std::cos(k * std::numbers::pi / (spec.p + 1));
  }
  std::sort(eig.data(), eig.data() + eig.size());
  return eig;
}

double alpha_threshold(int p) {
  if (p < 1) throw std::invalid_argument("alpha_threshold: p must be >= 1");
  return 1.0 - std::cos(p * std::numbers::pi / (p + 1));
}

double alpha_sharp_threshold(int p) {
  if (p < 1) throw std::invalid_argument("alpha_sharp_threshold: p must be >= 1");
  return 2.0 * std::cos(std::numbers::pi / (p + 1));
}

CouplingMatrixSeries CouplingMatrixSeries::build(const OUPathSet& ou, double L, double nu,
                                                 CouplingVariant variant) {
  CouplingMatrixSeries series;
  series.grid = ou.grid;
  series.nu = nu;
  series.L = L;
  series.variant = variant;
  const double l_term = (variant == CouplingVariant::Pairwise) ? 2.0 * L : L;
  series.diagonal = 2.0 * ou.values;
  series.diagonal.array() -= l_term + 2.0 * nu;
  return series;
}

Eigen::MatrixXd CouplingMatrixSeries::matrix_at(int k) const {
  const int n = size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    A(j, j) = diagonal(j, k);
    const int jn = (j + 1) % n;
    A(j, jn) = nu;
    A(jn, j) = nu;
  }
  return A;
}

double circulant_quadratic_form(const CouplingMatrixSeries& series,
                                const Eigen::VectorXd& xi, int t_index) {
  const int n = series.size();
  if (xi.size() != n) throw std::invalid_argument("circulant_quadratic_form: xi size != N");
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    value += series.diagonal(j, t_index) * xi(j) * xi(j);
    value += 2.0 * series.nu * xi(j) * xi((j + 1) % n);
  }
  return value;
}

double circulant_quadratic_form_accumulated(const CouplingMatrixSeries& series,
                                            const Eigen::VectorXd& xi, int k0, int k) {
  const int n = series.size();
  if (xi.size() != n) throw std::invalid_argument("circulant_quadratic_form: xi size != N");
  if (k0 > k) throw std::invalid_argument("circulant_quadratic_form: k0 must be <= k");
  const double h = series.grid.h;
  const double dt = h * static_cast<double>(k - k0);
  double value = 0.0;
  for (int j = 0; j < n; ++j) {
    double diag_int = 0.0;
    for (int i = k0; i < k; ++i) {
      diag_int += 0.5 * h * (series.diagonal(j, i) + series.diagonal(j, i + 1));
    }
    value += diag_int * xi(j) * xi(j);
    value += 2.0 * series.nu * dt * xi(j) * xi((j + 1) % n);
  }
  return value;
}

Eigen::VectorXd symmetric_expm_apply(const Eigen::MatrixXd& M, const Eigen::VectorXd& v) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  return solver.eigenvectors() *
         (solver.eigenvalues().array().exp().matrix().asDiagonal() *
          (solver.eigenvectors().transpose() * v));
}

std::vector<double> composite_weights(int k, double h) {
  std::vector<double> w(static_cast<size_t>(k) + 1, 0.0);
  if (k == 0) return w;
  if (k == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  int simpson_end = (k % 2 == 0) ? k : k - 3;
  if (simpson_end < 0) simpson_end = 0;  // k == 1 handled above; k == 3 -> pure 3/8
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end < k) {
    w[simpson_end] += 3.0 * h / 8.0;
    w[simpson_end + 1] += 9.0 * h / 8.0;
    w[simpson_end + 2] += 9.0 * h / 8.0;
    w[simpson_end + 3] += 3.0 * h / 8.0;
  }
  return w;
}

namespace {

void check_structure(const Eigen::MatrixXd& A) {
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("comparison_bound: matrix series must be symmetric");
  }
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) {
      if (i != j && A(i, j) < -1e-12 * scale) {
        throw std::invalid_argument(
            "comparison_bound: off-diagonal entries must be nonnegative (cooperative system)");
      }
    }
  }
}

}  // namespace

std::vector<Eigen::VectorXd> comparison_bound(const std::vector<Eigen::MatrixXd>& A,
                                              const std::vector<Eigen::VectorXd>& psi,
                                              const Eigen::VectorXd& phi0, double h) {
  const int n = static_cast<int>(A.size());
  if (n == 0) throw std::invalid_argument("comparison_bound: empty matrix series");
  if (!(h > 0.0)) throw std::invalid_argument("comparison_bound: h must be positive");
  const bool has_psi = !psi.empty();
  if (has_psi && psi.size() != A.size()) {
    throw std::invalid_argument("comparison_bound: psi series length != A series length");
  }
  const int p = static_cast<int>(A.front().rows());
  for (const auto& a : A) check_structure(a);

  // Trapezoid-cumulative S_k = int_{t_0}^{t_k} A.
  std::vector<Eigen::MatrixXd> S(static_cast<size_t>(n));
  S[0] = Eigen::MatrixXd::Zero(p, p);
  for (int k = 1; k < n; ++k) S[k] = S[k - 1] + 0.5 * h * (A[k - 1] + A[k]);

  std::vector<Eigen::VectorXd> bound(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd value = symmetric_expm_apply(S[k], phi0);
    if (has_psi && k > 0) {
      const std::vector<double> w = composite_weights(k, h);
      for (int u = 0; u <= k; ++u) {
        if (w[u] == 0.0) continue;
        value += w[u] * symmetric_expm_apply(S[k] - S[u], psi[u]);
      }
    }
    bound[k] = std::move(value);
  }
  return bound;
}

}  // namespace syncsim
