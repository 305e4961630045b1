#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "syncsim/spectral.hpp"

using namespace syncsim;

TEST_CASE("tridiagonal eigenvalues, small cases by hand") {
  Eigen::VectorXd e1 = tridiag_eigenvalues({1, 2.0});
  CHECK(e1.size() == 1);
  CHECK(e1(0) == doctest::Approx(-2.0));

  // p = 2, alpha = 1.5: eigenvalues -1.5 +/- 1
  Eigen::VectorXd e2 = tridiag_eigenvalues({2, 1.5});
  CHECK(e2(0) == doctest::Approx(-2.5));
  CHECK(e2(1) == doctest::Approx(-0.5));

  CHECK_THROWS_AS(tridiag_eigenvalues({0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(tridiag_matrix({-1, 1.0}), std::invalid_argument);
}

TEST_CASE("closed form matches a dense eigensolver") {
  for (int p : {1, 2, 3, 5, 8, 13, 21}) {
    for (double alpha : {0.0, 0.7, 2.3}) {
      TridiagSpec spec{p, alpha};
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tridiag_matrix(spec));
      CHECK((tridiag_eigenvalues(spec) - solver.eigenvalues()).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("alpha thresholds") {
  for (int p = 2; p <= 30; ++p) {
    const double a0 = alpha_threshold(p);
    CHECK(a0 == doctest::Approx(1.0 - std::cos(p * M_PI / (p + 1))));
    CHECK(tridiag_eigenvalues({p, a0}).maxCoeff() < 0.0);

    // 2 cos(pi/(p+1)) is sharp: negative definite just above, not below
    const double sharp = alpha_sharp_threshold(p);
    CHECK(a0 > sharp);
    CHECK(tridiag_eigenvalues({p, sharp + 1e-6}).maxCoeff() < 0.0);
    CHECK(tridiag_eigenvalues({p, sharp - 1e-6}).maxCoeff() > 0.0);
  }
}

namespace {

OUPathSet flat_paths(int N, const TimeGrid& g, double value) {
  OUPathSet ou;
  ou.grid = g;
  ou.values = Eigen::MatrixXd::Constant(N, g.n_points, value);
  ou.coeffs = Eigen::MatrixXd::Zero(N, 1);
  return ou;
}

}  // namespace

TEST_CASE("coupling matrix series structure") {
  TimeGrid g = TimeGrid::make(0.0, 1.0, 0.1);
  OUPathSet ou = flat_paths(4, g, 0.3);
  const double L = 1.2, nu = 2.0;

  CouplingMatrixSeries pw = CouplingMatrixSeries::build(ou, L, nu, CouplingVariant::Pairwise);
  Eigen::MatrixXd A = pw.matrix_at(0);
  CHECK(A(0, 0) == doctest::Approx(2.0 * 0.3 - 2.0 * L - 2.0 * nu));
  CHECK(A(0, 1) == doctest::Approx(nu));
  CHECK(A(0, 3) == doctest::Approx(nu));
  CHECK(A(0, 2) == doctest::Approx(0.0));
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);

  CouplingMatrixSeries ab = CouplingMatrixSeries::build(ou, L, nu, CouplingVariant::Absorbing);
  CHECK(ab.matrix_at(0)(1, 1) == doctest::Approx(2.0 * 0.3 - L - 2.0 * nu));

  // circulant spectrum: -2L + 2nu (cos(2 pi k / N) - 1) + 2 O for the pairwise
  // variant with flat paths
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  std::vector<double> expected;
  for (int k = 0; k < 4; ++k) {
    expected.push_back(2.0 * 0.3 - 2.0 * L - 2.0 * nu + 2.0 * nu * std::cos(2.0 * M_PI * k / 4.0));
  }
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 4; ++k) {
    CHECK(solver.eigenvalues()(k) == doctest::Approx(expected[static_cast<size_t>(k)]));
  }
}

TEST_CASE("quadratic forms match the dense matrix") {
  TimeGrid g = TimeGrid::make(0.0, 1.0, 0.25);
  OUPathSet ou;
  ou.grid = g;
  ou.values = Eigen::MatrixXd::Random(3, g.n_points);
  ou.coeffs = Eigen::MatrixXd::Zero(3, 1);
  CouplingMatrixSeries series =
      CouplingMatrixSeries::build(ou, 1.0, 0.8, CouplingVariant::Pairwise);

  Eigen::VectorXd xi(3);
  xi << 1.0, -0.5, 2.0;
  for (int k = 0; k < g.n_points; ++k) {
    CHECK(circulant_quadratic_form(series, xi, k) ==
          doctest::Approx(xi.dot(series.matrix_at(k) * xi)).epsilon(1e-12));
  }

  // accumulated form equals trapezoid over the instantaneous dense matrices
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 3);
  for (int k = 1; k < g.n_points; ++k) {
    S += 0.5 * g.h * (series.matrix_at(k - 1) + series.matrix_at(k));
    CHECK(circulant_quadratic_form_accumulated(series, xi, 0, k) ==
          doctest::Approx(xi.dot(S * xi)).epsilon(1e-12));
  }
}

TEST_CASE("composite quadrature weights") {
  for (int k : {1, 2, 3, 4, 5, 6, 7}) {
    const double h = 0.1;
    std::vector<double> w = composite_weights(k, h);
    double total = 0.0;
    for (double wi : w) total += wi;
    CHECK(total == doctest::Approx(k * h).epsilon(1e-13));
    if (k >= 2) {
      // Simpson and 3/8 segments are exact on cubics
      double integral = 0.0;
      for (int i = 0; i <= k; ++i) integral += w[static_cast<size_t>(i)] * std::pow(i * h, 3);
      CHECK(integral == doctest::Approx(std::pow(k * h, 4) / 4.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("comparison bound, scalar Gronwall case") {
  const double a = -0.7, h = 1e-3;
  const int n = 1001;
  std::vector<Eigen::MatrixXd> A(n, Eigen::MatrixXd::Constant(1, 1, a));
  Eigen::VectorXd phi0(1);
  phi0 << 2.0;
  std::vector<Eigen::VectorXd> bound = comparison_bound(A, {}, phi0, h);
  for (int k = 0; k < n; k += 100) {
    // constant coefficient: the trapezoid accumulation is exact
    CHECK(bound[static_cast<size_t>(k)](0) ==
          doctest::Approx(2.0 * std::exp(a * k * h)).epsilon(1e-13));
  }
}

TEST_CASE("comparison bound, time-varying scalar") {
  const double h = 1e-3;
  const int n = 1001;
  std::vector<Eigen::MatrixXd> A;
  for (int k = 0; k < n; ++k) A.push_back(Eigen::MatrixXd::Constant(1, 1, -(k * h)));
  Eigen::VectorXd phi0(1);
  phi0 << 1.0;
  std::vector<Eigen::VectorXd> bound = comparison_bound(A, {}, phi0, h);
  const double t = (n - 1) * h;
  CHECK(bound.back()(0) == doctest::Approx(std::exp(-t * t / 2.0)).epsilon(1e-6));
}

TEST_CASE("comparison bound, constant matrix with forcing") {
  const double h = 1e-3;
  const int n = 1001;
  Eigen::MatrixXd M(2, 2);
  M << -2.0, 1.0, 1.0, -2.0;
  Eigen::VectorXd psi_v(2);
  psi_v << 1.0, 0.5;
  Eigen::VectorXd phi0(2);
  phi0 << 1.0, 2.0;
  std::vector<Eigen::MatrixXd> A(n, M);
  std::vector<Eigen::VectorXd> psi(n, psi_v);
  std::vector<Eigen::VectorXd> bound = comparison_bound(A, psi, phi0, h);

  // phi(t) = e^{Mt} phi0 + M^{-1}(e^{Mt} - I) psi
  for (int k : {100, 500, 1000}) {
    const double t = k * h;
    Eigen::MatrixXd expM = (M * t).exp();
    Eigen::VectorXd exact =
        expM * phi0 + M.inverse() * (expM - Eigen::MatrixXd::Identity(2, 2)) * psi_v;
    CHECK((bound[static_cast<size_t>(k)] - exact).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("comparison bound, forcing monotonicity") {
  const double h = 0.01;
  const int n = 101;
  Eigen::MatrixXd M(2, 2);
  M << -1.0, 0.3, 0.3, -1.0;
  std::vector<Eigen::MatrixXd> A(n, M);
  Eigen::VectorXd phi0 = Eigen::VectorXd::Ones(2);
  std::vector<Eigen::VectorXd> small(n, Eigen::VectorXd::Constant(2, 0.1));
  std::vector<Eigen::VectorXd> large(n, Eigen::VectorXd::Constant(2, 0.5));
  std::vector<Eigen::VectorXd> lo = comparison_bound(A, small, phi0, h);
  std::vector<Eigen::VectorXd> hi = comparison_bound(A, large, phi0, h);
  for (int k = 1; k < n; ++k) {
    CHECK((hi[static_cast<size_t>(k)] - lo[static_cast<size_t>(k)]).minCoeff() > 0.0);
  }
}

TEST_CASE("comparison bound rejects non-cooperative input") {
  Eigen::MatrixXd nonsym(2, 2);
  nonsym << -1.0, 0.5, 0.2, -1.0;
  CHECK_THROWS_AS(comparison_bound({nonsym}, {}, Eigen::VectorXd::Ones(2), 0.1),
                  std::invalid_argument);

  Eigen::MatrixXd negoff(2, 2);
  negoff << -1.0, -0.5, -0.5, -1.0;
  CHECK_THROWS_AS(comparison_bound({negoff}, {}, Eigen::VectorXd::Ones(2), 0.1),
                  std::invalid_argument);

  CHECK_THROWS_AS(comparison_bound({}, {}, Eigen::VectorXd::Ones(2), 0.1),
                  std::invalid_argument);
}

TEST_CASE("symmetric matrix exponential") {
  Eigen::MatrixXd M(2, 2);
  M << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd v(2);
  v << 1.0, 0.0;
  // exp(M) = [[cosh 1, sinh 1], [sinh 1, cosh 1]]
  Eigen::VectorXd out = symmetric_expm_apply(M, v);
  CHECK(out(0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
  CHECK(out(1) == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
}
