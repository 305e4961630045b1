#ifndef SYNCSIM_SPECTRAL_HPP
#define SYNCSIM_SPECTRAL_HPP

#include <Eigen/Core>
#include <vector>

#include "syncsim/ou.hpp"

namespace syncsim {

/// p x p symmetric tridiagonal matrix with -alpha on the diagonal and unit
/// off-diagonals.
struct TridiagSpec {
  int p = 1;
  double alpha = 0.0;
};

Eigen::MatrixXd tridiag_matrix(const TridiagSpec& spec);

/// Closed-form eigenvalues -alpha + 2 cos(k pi / (p+1)), ascending.
Eigen::VectorXd tridiag_eigenvalues(const TridiagSpec& spec);

/// 1 - cos(p pi / (p+1)); the matrix is negative definite for alpha at or
/// above this value.
double alpha_threshold(int p);

/// Sharp negative-definiteness boundary 2 cos(pi / (p+1)), for diagnostics.
double alpha_sharp_threshold(int p);

enum class CouplingVariant { Pairwise, Absorbing };

/// Time series of the N x N symmetric circulant comparison matrices: constant
/// off-diagonal nu at cyclic neighbors, time-dependent diagonal
///   pairwise:  a^{(j)}(t) = 2 O^{(j)}_t - 2L - 2nu
///   absorbing: a^{(j)}(t) = 2 O^{(j)}_t -  L - 2nu
struct CouplingMatrixSeries {
  TimeGrid grid;
  double nu = 1.0;
  double L = 1.0;
  CouplingVariant variant = CouplingVariant::Pairwise;
  Eigen::MatrixXd diagonal;  // N x n_points

  static CouplingMatrixSeries build(const OUPathSet& ou, double L, double nu,
                                    CouplingVariant variant);

  int size() const { return static_cast<int>(diagonal.rows()); }
  Eigen::MatrixXd matrix_at(int k) const;
};

/// Instantaneous quadratic form xi^T A(t_k) xi.
double circulant_quadratic_form(const CouplingMatrixSeries& series,
                                const Eigen::VectorXd& xi, int t_index);

/// Accumulated form xi^T (int_{t_{k0}}^{t_k} A) xi, diagonal integrated by
/// trapezoid on the shared grid.
double circulant_quadratic_form_accumulated(const CouplingMatrixSeries& series,
                                            const Eigen::VectorXd& xi, int k0, int k);

/// Componentwise comparison bound: given symmetric cooperative A(t) and psi(t)
/// on a uniform grid of step h, returns at each node t_k
///   exp(int_{t0}^{t_k} A) phi0 + int_{t0}^{t_k} exp(int_u^{t_k} A) psi(u) du
/// with the inner integral by trapezoid and matrix exponentials through a
/// symmetric eigendecomposition. Rejects non-symmetric A or negative
/// off-diagonal entries.
std::vector<Eigen::VectorXd> comparison_bound(const std::vector<Eigen::MatrixXd>& A,
                                              const std::vector<Eigen::VectorXd>& psi,
                                              const Eigen::VectorXd& phi0, double h);

/// exp(M) v for symmetric M.
Eigen::VectorXd symmetric_expm_apply(const Eigen::MatrixXd& M, const Eigen::VectorXd& v);

/// Composite quadrature weights over nodes 0..k with step h (Simpson, with a
/// 3/8 tail for odd interval counts, trapezoid for a single interval).
std::vector<double> composite_weights(int k, double h);

}  // namespace syncsim

#endif
