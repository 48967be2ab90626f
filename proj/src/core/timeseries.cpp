#include "timeseries.hpp"

#include <string>

namespace anvar {

TimeSeries slice(const TimeSeries& s, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > s.rows())
    throw InvalidArgumentError("slice [" + std::to_string(begin) + ", " +
                               std::to_string(begin + count) + ") out of range for " +
                               std::to_string(s.rows()) + " rows");
  TimeSeries out;
  out.data = s.data.middleRows(begin, count);
  out.dt = s.dt;
  out.t0 = s.time_at(begin);
  return out;
}

TimeSeries decimate(const TimeSeries& s, Index stride) {
  if (stride < 1) throw InvalidArgumentError("decimation stride must be >= 1");
  const Index n = (s.rows() + stride - 1) / stride;
  TimeSeries out;
  out.data.resize(n, s.dim());
  for (Index i = 0; i < n; ++i) out.data.row(i) = s.data.row(i * stride);
  out.dt = s.dt * static_cast<double>(stride);
  out.t0 = s.t0;
  return out;
}

} // namespace anvar
