#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "syncsim/noise.hpp"
#include "syncsim/ou.hpp"

using namespace syncsim;

TEST_CASE("grid construction and node lookup") {
  TimeGrid g = TimeGrid::make(-2.0, 3.0, 0.5);
  CHECK(g.n_points == 11);
  CHECK(g.time_at(0) == doctest::Approx(-2.0));
  CHECK(g.time_at(10) == doctest::Approx(3.0));
  CHECK(g.index_of(0.0) == 4);
  CHECK(g.zero_index() == 4);
  CHECK(g.straddles_zero());
  CHECK_THROWS_AS(g.index_of(0.25), AlignmentError);
  CHECK_THROWS_AS(g.index_of(4.0), std::out_of_range);

  CHECK_THROWS_AS(TimeGrid::make(0.0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::make(0.0, 1.05, 0.1), std::invalid_argument);
  // 0 would fall between nodes
  CHECK_THROWS_AS(TimeGrid::make(-0.25, 0.75, 0.5), std::invalid_argument);
  // one-sided grids need not contain 0
  CHECK_NOTHROW(TimeGrid::make(0.25, 0.75, 0.25));
}

TEST_CASE("wiener path anchors at zero and matches increments") {
  TimeGrid g = TimeGrid::make(-1.0, 1.0, 0.1);
  NoiseGrid noise = sample_wiener(42, g, 2);
  CHECK(noise.drivers() == 2);
  CHECK(noise.increments.cols() == g.n_points - 1);

  CHECK(noise.wiener_at(g.zero_index()).norm() == 0.0);
  Eigen::MatrixXd w = noise.wiener_path();
  CHECK(w.col(g.zero_index()).norm() == 0.0);
  for (int k = 0; k + 1 < g.n_points; ++k) {
    CHECK((w.col(k + 1) - w.col(k) - noise.increments.col(k)).norm() ==
          doctest::Approx(0.0).epsilon(1e-14));
  }
  for (int k = 0; k < g.n_points; ++k) {
    CHECK((noise.wiener_at(k) - w.col(k)).norm() == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  TimeGrid g = TimeGrid::make(0.0, 1.0, 0.01);
  NoiseGrid a = sample_wiener(7, g, 1);
  NoiseGrid b = sample_wiener(7, g, 1);
  NoiseGrid c = sample_wiener(8, g, 1);
  CHECK(a.increments == b.increments);
  CHECK(a.increments != c.increments);
}

TEST_CASE("increment moments match Normal(0, h)") {
  TimeGrid g = TimeGrid::make(0.0, 100.0, 0.01);
  NoiseGrid noise = sample_wiener(3, g, 1);
  const int n = static_cast<int>(noise.increments.cols());
  double mean = noise.increments.row(0).mean();
  double var = noise.increments.row(0).array().square().mean() - mean * mean;
  // 10000 samples: sd of the mean is 1e-3, sd of the variance is ~1.4e-4
  CHECK(std::abs(mean) < 5e-3);
  CHECK(var == doctest::Approx(g.h).epsilon(0.05));
  CHECK(n == 10000);
}

TEST_CASE("derive_seed separates sub-streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("path shift translates the grid and fixes increments") {
  TimeGrid g = TimeGrid::make(-2.0, 2.0, 0.1);
  NoiseGrid noise = sample_wiener(11, g, 1);

  NoiseGrid same = shift_path(noise, 0.0);
  CHECK(same.grid.t_min == doctest::Approx(g.t_min));
  CHECK(same.increments == noise.increments);

  NoiseGrid shifted = shift_path(noise, 1.0);
  CHECK(shifted.grid.t_min == doctest::Approx(-3.0));
  CHECK(shifted.grid.t_max == doctest::Approx(1.0));

  // theta_s omega(t) = omega(t + s) - omega(s)
  Eigen::MatrixXd w = noise.wiener_path();
  Eigen::MatrixXd ws = shifted.wiener_path();
  const int ks = g.index_of(1.0);
  for (int k = 0; k < g.n_points; ++k) {
    CHECK(ws(0, k) == doctest::Approx(w(0, k) - w(0, ks)).epsilon(1e-12));
  }

  // group property: shifting by s1 then s2 equals shifting by s1 + s2
  NoiseGrid two_step = shift_path(shift_path(noise, 0.5), 0.5);
  CHECK(two_step.grid.t_min == doctest::Approx(shifted.grid.t_min));
  CHECK(two_step.increments == shifted.increments);

  CHECK_THROWS_AS(shift_path(noise, 0.05), AlignmentError);
  CHECK_THROWS_AS(shift_path(noise, 5.0), std::out_of_range);
}

TEST_CASE("sublinear growth of sampled paths") {
  TimeGrid g = TimeGrid::make(0.0, 200.0, 0.01);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    NoiseGrid noise = sample_wiener(seed, g, 1);
    double w_end = noise.wiener_at(g.n_points - 1)(0);
    CHECK(std::abs(w_end) / 200.0 < 0.3);
  }
}

TEST_CASE("OU recursion and degenerate cases") {
  TimeGrid g = TimeGrid::make(-1.0, 1.0, 0.05);
  NoiseGrid noise = sample_wiener(21, g, 2);
  Eigen::MatrixXd coeffs(3, 2);
  coeffs << 0.5, 0.1, 0.5, 0.1, 0.2, -0.4;

  OUPathSet ou = build_ou_paths(noise, coeffs, OuInit::stationary());
  CHECK(ou.systems() == 3);
  const double decay = std::exp(-g.h);
  for (int k = 0; k + 1 < g.n_points; ++k) {
    Eigen::VectorXd expected = decay * ou.values.col(k) + coeffs * noise.increments.col(k);
    CHECK((ou.values.col(k + 1) - expected).norm() == doctest::Approx(0.0).epsilon(1e-13));
  }
  // identical coefficient rows give identical paths
  CHECK((ou.values.row(0) - ou.values.row(1)).cwiseAbs().maxCoeff() == 0.0);

  OUPathSet zero = build_ou_paths(noise, Eigen::MatrixXd::Zero(3, 2), OuInit::stationary());
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd init(3);
  init << 1.0, -2.0, 0.5;
  OUPathSet expl = build_ou_paths(noise, Eigen::MatrixXd::Zero(3, 2),
                                  OuInit::explicit_values(init));
  // zero coefficients: pure exponential decay from the explicit start
  for (int k = 0; k < g.n_points; ++k) {
    CHECK(expl.values(1, k) == doctest::Approx(-2.0 * std::exp(-g.h * k)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(build_ou_paths(noise, Eigen::MatrixXd::Zero(3, 1), OuInit::stationary()),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      build_ou_paths(noise, coeffs, OuInit::explicit_values(Eigen::VectorXd::Zero(2))),
      std::invalid_argument);
}

TEST_CASE("stationary initialization has covariance (1/2) C C^T") {
  TimeGrid g = TimeGrid::make(0.0, 0.1, 0.1);
  Eigen::MatrixXd coeffs(2, 2);
  coeffs << 0.6, 0.2, 0.1, 0.5;
  const int n_seeds = 4000;
  Eigen::MatrixXd samples(2, n_seeds);
  for (int s = 0; s < n_seeds; ++s) {
    NoiseGrid noise = sample_wiener(static_cast<std::uint64_t>(s + 1), g, 2);
    OUPathSet ou = build_ou_paths(noise, coeffs, OuInit::stationary());
    samples.col(s) = ou.values.col(0);
  }
  Eigen::Vector2d mean = samples.rowwise().mean();
  Eigen::MatrixXd centered = samples.colwise() - mean;
  Eigen::MatrixXd cov = centered * centered.transpose() / n_seeds;
  Eigen::MatrixXd expected = 0.5 * coeffs * coeffs.transpose();
  CHECK(cov(0, 0) == doctest::Approx(expected(0, 0)).epsilon(0.10));
  CHECK(cov(1, 1) == doctest::Approx(expected(1, 1)).epsilon(0.10));
  CHECK(cov(0, 1) == doctest::Approx(expected(0, 1)).epsilon(0.20));
}

TEST_CASE("cumulative integral and ergodic average on a decaying path") {
  TimeGrid g = TimeGrid::make(-5.0, 5.0, 0.001);
  NoiseGrid noise = sample_wiener(1, g, 1);
  noise.increments.setZero();
  Eigen::VectorXd init(1);
  init << 2.0;
  OUPathSet ou = build_ou_paths(noise, Eigen::MatrixXd::Zero(1, 1),
                                OuInit::explicit_values(init));
  // O(t) = 2 e^{-(t - t_min)}; relative to t = 0 the path is 2 e^{5} e^{-5 - t}
  const double o0 = ou.values(0, g.zero_index());
  Eigen::VectorXd acc = ou_cumulative_integral(ou, 0);
  const int k2 = g.index_of(2.0);
  CHECK(acc(k2) == doctest::Approx(o0 * (1.0 - std::exp(-2.0))).epsilon(1e-5));
  CHECK(ergodic_average(ou, 0, 2.0) ==
        doctest::Approx(o0 * (1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-5));
  const int km = g.index_of(-1.0);
  CHECK(acc(km) == doctest::Approx(-o0 * (std::exp(1.0) - 1.0)).epsilon(1e-5));
  CHECK_THROWS_AS(ergodic_average(ou, 0, 0.0), std::invalid_argument);
}

namespace {

OUPathSet constant_path(const TimeGrid& g, double value) {
  OUPathSet ou;
  ou.grid = g;
  ou.values = Eigen::MatrixXd::Constant(1, g.n_points, value);
  ou.coeffs = Eigen::MatrixXd::Zero(1, 1);
  return ou;
}

}  // namespace

TEST_CASE("T_omega on constant paths") {
  TimeGrid g = TimeGrid::make(-10.0, 10.0, 0.1);

  TOmegaEstimate zero = estimate_T_omega(constant_path(g, 0.0), 1.0);
  CHECK(zero.found);
  CHECK(zero.value == doctest::Approx(0.0));

  TOmegaEstimate neg = estimate_T_omega(constant_path(g, -1.0), 1.0);
  CHECK(neg.found);
  CHECK(neg.value == doctest::Approx(0.0));

  // O = L/2 violates the L/4 drift condition at every time: sentinel
  TOmegaEstimate big = estimate_T_omega(constant_path(g, 0.5), 1.0);
  CHECK(!big.found);
  CHECK(big.value == doctest::Approx(g.t_max));

  CHECK_THROWS_AS(estimate_T_omega(constant_path(g, 0.0), 0.0), std::invalid_argument);
  TimeGrid one_sided = TimeGrid::make(0.0, 1.0, 0.1);
  CHECK_THROWS_AS(estimate_T_omega(constant_path(one_sided, 0.0), 1.0),
                  std::invalid_argument);
}

TEST_CASE("T_omega locates the last violation of a bump path") {
  TimeGrid g = TimeGrid::make(-10.0, 10.0, 0.1);
  OUPathSet ou;
  ou.grid = g;
  ou.values = Eigen::MatrixXd::Zero(1, g.n_points);
  ou.coeffs = Eigen::MatrixXd::Zero(1, 1);
  for (int k = 0; k < g.n_points; ++k) {
    if (std::abs(g.time_at(k)) <= 1.0 + 1e-12) ou.values(0, k) = 0.5;
  }
  // int_0^t O = 1/2 min(t, 1) + trapezoid edge; the condition (L/4) t with
  // L = 1 first holds from t just above 4 * integral, i.e. near t = 2.
  TOmegaEstimate est = estimate_T_omega(ou, 1.0);
  CHECK(est.found);
  CHECK(est.value == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("paths export as CSV with t, W, O columns") {
  namespace fs = std::filesystem;
  TimeGrid g = TimeGrid::make(-1.0, 1.0, 0.5);
  NoiseGrid noise = sample_wiener(7, g, 2);
  OUPathSet ou = build_ou_paths(noise, Eigen::MatrixXd::Constant(3, 2, 0.5),
                                OuInit::stationary());
  fs::path path = fs::temp_directory_path() / "syncsim-paths.csv";
  write_paths_csv(noise, ou, path.string(), "seed=7");

  std::ifstream in(path);
  std::string header, columns, first;
  std::getline(in, header);
  std::getline(in, columns);
  std::getline(in, first);
  CHECK(header == "# seed=7");
  CHECK(columns == "t,W_1,W_2,O_1,O_2,O_3");
  // 5 grid nodes follow the two header lines
  int rows = 1;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == g.n_points);
  CHECK(first.substr(0, 3) == "-1,");
  fs::remove(path);

  OUPathSet other = build_ou_paths(sample_wiener(7, TimeGrid::make(0.0, 1.0, 0.5), 2),
                                   Eigen::MatrixXd::Constant(1, 2, 0.5),
                                   OuInit::stationary());
  CHECK_THROWS_AS(write_paths_csv(noise, other, path.string(), "x"),
                  std::invalid_argument);
}
