#include "features.hpp"

#include <string>

namespace anvar {

void EmbeddingSpec::validate() const {
  if (k < 1) throw InvalidArgumentError("embedding k must be >= 1");
  if (s < 1) throw InvalidArgumentError("embedding s must be >= 1");
  if (d < 1) throw InvalidArgumentError("embedding d must be >= 1");
}

FeatureMatrix delay_embed(const TimeSeries& series, const EmbeddingSpec& spec) {
  spec.validate();
  if (series.dim() != spec.d)
    throw DimensionError("series dimension " + std::to_string(series.dim()) +
                         " does not match embedding d=" + std::to_string(spec.d));
  const Index i0 = spec.first_index();
  if (series.rows() <= i0)
    throw SeriesTooShortError("series has " + std::to_string(series.rows()) +
                              " rows; delay embedding with k=" + std::to_string(spec.k) +
                              ", s=" + std::to_string(spec.s) + " needs at least " +
                              std::to_string(spec.min_rows()));

  const Index n = series.rows() - i0;
  FeatureMatrix out;
  out.rows.resize(n, spec.linear_dim());
  out.layout = {spec.linear_dim(), 0, false};
  out.first_time_index = i0;
  for (Index r = 0; r < n; ++r) {
    const Index i = i0 + r;
    for (Index delay = 0; delay < spec.k; ++delay)
      out.rows.block(r, delay * spec.d, 1, spec.d) = series.data.row(i - delay * spec.s);
  }
  return out;
}

Vec quadratic_monomials(ConstVecRef x) {
  const Index n = x.size();
  Vec out(monomial_dim(n));
  Index p = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) out[p++] = x[i] * x[j];
  return out;
}

Mat quadratic_monomials_rows(ConstMatRef linear_rows) {
  const Index n = linear_rows.cols();
  Mat out(linear_rows.rows(), monomial_dim(n));
  for (Index r = 0; r < linear_rows.rows(); ++r) {
    Index p = 0;
    for (Index i = 0; i < n; ++i) {
      const double xi = linear_rows(r, i);
      for (Index j = i; j < n; ++j) out(r, p++) = xi * linear_rows(r, j);
    }
  }
  return out;
}

FeatureMatrix assemble_total(const FeatureMatrix& linear, ConstMatRef nonlinear,
                             std::optional<double> bias) {
  if (nonlinear.rows() != linear.rows.rows() && nonlinear.size() != 0)
    throw DimensionError("linear block has " + std::to_string(linear.rows.rows()) +
                         " rows, nonlinear block has " + std::to_string(nonlinear.rows()));
  const Index n = linear.rows.rows();
  const Index nl = nonlinear.size() == 0 ? 0 : nonlinear.cols();

  FeatureMatrix out;
  out.layout = {linear.layout.linear_dim, nl, bias.has_value()};
  out.first_time_index = linear.first_time_index;
  out.rows.resize(n, out.layout.row_dim());
  Index col = 0;
  if (bias) {
    out.rows.col(0).setConstant(*bias);
    col = 1;
  }
  out.rows.middleCols(col, linear.rows.cols()) = linear.rows;
  if (nl > 0) out.rows.middleCols(col + linear.rows.cols(), nl) = nonlinear;
  return out;
}

} // namespace anvar
