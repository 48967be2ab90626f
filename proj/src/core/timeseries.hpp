#pragma once

#include "error.hpp"
#include "types.hpp"

namespace anvar {

/// Time-major sequence of d-dimensional states on a uniform grid.
struct TimeSeries {
  Mat data;        // T x d
  double dt = 0.0; // grid spacing
  double t0 = 0.0; // time of row 0

  Index rows() const noexcept { return data.rows(); }
  Index dim() const noexcept { return data.cols(); }
  double time_at(Index i) const noexcept { return t0 + static_cast<double>(i) * dt; }
};

/// Rows [begin, begin+count) as a series starting at the matching grid time.
TimeSeries slice(const TimeSeries& s, Index begin, Index count);

/// Every stride-th row starting at row 0; dt scales by the stride.
TimeSeries decimate(const TimeSeries& s, Index stride);

} // namespace anvar
