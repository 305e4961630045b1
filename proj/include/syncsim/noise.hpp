#ifndef SYNCSIM_NOISE_HPP
#define SYNCSIM_NOISE_HPP

#include <Eigen/Core>
#include <cstdint>

#include "syncsim/time_grid.hpp"

namespace syncsim {

/// Shared two-sided Wiener increments for m independent scalar drivers.
/// Row i holds the increments of W^{(i)}; increment k spans [t_k, t_{k+1}]
/// and is Normal(0, h). The path is reconstructed relative to the zero node,
/// so W(0) = 0 exactly.
struct NoiseGrid {
  TimeGrid grid;
  Eigen::MatrixXd increments;  // m x (n_points - 1)
  std::uint64_t seed = 0;

  int drivers() const { return static_cast<int>(increments.rows()); }

  /// W(t_k) - W(0) by signed partial sums.
  Eigen::VectorXd wiener_at(int k) const;

  /// Full m x n_points reconstruction.
  Eigen::MatrixXd wiener_path() const;
};

NoiseGrid sample_wiener(std::uint64_t seed, const TimeGrid& grid, int m);

/// Path shift theta_s: omega(. + s) - omega(s). Increments are untouched,
/// the grid is translated by -s; s must be grid-aligned and the shifted grid
/// must still contain 0 (window exhausted otherwise).
NoiseGrid shift_path(const NoiseGrid& noise, double s);

/// Deterministic sub-stream derivation so that stationary initial samples and
/// initial-state draws never overlap the increment stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace syncsim

#endif
