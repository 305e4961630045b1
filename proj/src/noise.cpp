#include "syncsim/noise.hpp"

#include <cmath>
#include <random>

namespace syncsim {

Eigen::VectorXd NoiseGrid::wiener_at(int k) const {
  const int k0 = grid.straddles_zero() ? grid.zero_index() : 0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(drivers());
  if (k >= k0) {
    for (int i = k0; i < k; ++i) w += increments.col(i);
  } else {
    for (int i = k; i < k0; ++i) w -= increments.col(i);
  }
  return w;
}

Eigen::MatrixXd NoiseGrid::wiener_path() const {
  const int n = grid.n_points;
  const int k0 = grid.straddles_zero() ? grid.zero_index() : 0;
  Eigen::MatrixXd w(drivers(), n);
  w.col(k0).setZero();
  for (int k = k0 + 1; k < n; ++k) w.col(k) = w.col(k - 1) + increments.col(k - 1);
  for (int k = k0 - 1; k >= 0; --k) w.col(k) = w.col(k + 1) - increments.col(k);
  return w;
}

NoiseGrid sample_wiener(std::uint64_t seed, const TimeGrid& grid, int m) {
  if (m < 1) throw std::invalid_argument("sample_wiener: m must be >= 1");
  NoiseGrid noise;
  noise.grid = TimeGrid::make(grid.t_min, grid.t_max, grid.h);  // revalidates
  noise.seed = seed;
  noise.increments.resize(m, grid.n_points - 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(grid.h));
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < grid.n_points - 1; ++k) {
      noise.increments(i, k) = normal(rng);
    }
  }
  return noise;
}

NoiseGrid shift_path(const NoiseGrid& noise, double s) {
  const TimeGrid& g = noise.grid;
  if (!g.is_aligned(g.t_min + s)) {
    throw AlignmentError("shift_path: s is not a multiple of h");
  }
  const double new_min = g.t_min - s;
  const double new_max = g.t_max - s;
  if (!(new_min <= 0.0 && 0.0 <= new_max)) {
    throw std::out_of_range("shift_path: shifted window no longer contains 0");
  }
  NoiseGrid shifted;
  shifted.grid = TimeGrid::make(new_min, new_max, g.h);
  shifted.increments = noise.increments;
  shifted.seed = noise.seed;
  return shifted;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 over seed xor tag
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace syncsim
