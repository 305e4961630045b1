#ifndef SYNCSIM_TIME_GRID_HPP
#define SYNCSIM_TIME_GRID_HPP

#include <cmath>
#include <cstdint>

#include "syncsim/errors.hpp"

namespace syncsim {

/// Uniform time grid on [t_min, t_max] with step h.
/// If the interval straddles t = 0, zero must be a grid node (pullback runs
/// and the Wiener reconstruction W(0) = 0 both anchor there).
struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  double h = 0.0;
  int n_points = 0;

  static TimeGrid make(double t_min, double t_max, double h);

  double time_at(int k) const { return t_min + static_cast<double>(k) * h; }

  bool is_aligned(double t) const {
    const double k = (t - t_min) / h;
    return std::abs(k - std::round(k)) <= 1e-6;
  }

  /// Node index of an aligned time inside the grid; throws otherwise.
  int index_of(double t) const;

  bool straddles_zero() const { return t_min <= 0.0 && 0.0 <= t_max; }

  int zero_index() const { return index_of(0.0); }
};

}  // namespace syncsim

#endif
