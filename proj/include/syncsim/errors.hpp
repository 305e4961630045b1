#ifndef SYNCSIM_ERRORS_HPP
#define SYNCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace syncsim {

/// Raised when an exponential of an OU value would leave the double range.
/// Trajectories that hit this are flagged, never silently truncated.
class NumericRangeError : public std::runtime_error {
 public:
  explicit NumericRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// Grid / alignment violations (non grid-aligned times, exhausted windows).
class AlignmentError : public std::invalid_argument {
 public:
  explicit AlignmentError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace syncsim

#endif
