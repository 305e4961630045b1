#include "syncsim/time_grid.hpp"

#include <string>

namespace syncsim {

TimeGrid TimeGrid::make(double t_min, double t_max, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("TimeGrid: step h must be positive");
  }
  if (!(t_min < t_max)) {
    throw std::invalid_argument("TimeGrid: t_min must be less than t_max");
  }
  TimeGrid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.h = h;
  const double span = (t_max - t_min) / h;
  g.n_points = static_cast<int>(std::llround(span)) + 1;
  if (std::abs(span - std::round(span)) > 1e-6) {
    throw std::invalid_argument("TimeGrid: (t_max - t_min) is not a multiple of h");
  }
  if (g.straddles_zero() && !g.is_aligned(0.0)) {
    throw std::invalid_argument("TimeGrid: 0 must be a grid node when t_min <= 0 <= t_max");
  }
  return g;
}

int TimeGrid::index_of(double t) const {
  const double kf = (t - t_min) / h;
  const int k = static_cast<int>(std::llround(kf));
  if (std::abs(kf - std::round(kf)) > 1e-6) {
    throw AlignmentError("TimeGrid: time " + std::to_string(t) + " is not grid-aligned");
  }
  if (k < 0 || k >= n_points) {
    throw std::out_of_range("TimeGrid: time " + std::to_string(t) + " outside grid");
  }
  return k;
}

}  // namespace syncsim
