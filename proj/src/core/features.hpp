#pragma once

#include "timeseries.hpp"
#include "types.hpp"

#include <optional>

namespace anvar {

/// Delay-embedding geometry: k observations of a d-dimensional state spaced s
/// steps apart.
struct EmbeddingSpec {
  Index k = 1; // delay count
  Index s = 1; // skip between delays
  Index d = 1; // state dimension

  Index linear_dim() const noexcept { return d * k; }
  /// First time index with a complete embedding (0-based).
  Index first_index() const noexcept { return (k - 1) * s; }
  Index min_rows() const noexcept { return first_index() + 1; }
  Index window_rows() const noexcept { return first_index() + 1; }

  void validate() const;
};

struct FeatureLayout {
  Index linear_dim = 0;
  Index nonlinear_dim = 0;
  bool has_bias = false;

  Index row_dim() const noexcept { return (has_bias ? 1 : 0) + linear_dim + nonlinear_dim; }
};

/// Per-time-step feature vectors plus the layout needed to split a row back
/// into bias / linear / nonlinear blocks.
struct FeatureMatrix {
  Mat rows;
  FeatureLayout layout;
  Index first_time_index = 0; // series index of row 0
};

/// Embedded row for time i: X_i ++ X_{i-s} ++ ... ++ X_{i-(k-1)s}, newest
/// block first. One row per i in [first_index, T).
FeatureMatrix delay_embed(const TimeSeries& series, const EmbeddingSpec& spec);

/// Number of unique quadratic monomials over an n-vector: n(n+1)/2.
inline Index monomial_dim(Index n) noexcept { return n * (n + 1) / 2; }

/// Unique products x_i * x_j, i <= j, lexicographic in (i, j) with i outer.
/// The order is part of the on-disk model contract; do not change it.
Vec quadratic_monomials(ConstVecRef x);

/// Row-wise quadratic_monomials over a batch.
Mat quadratic_monomials_rows(ConstMatRef linear_rows);

/// [bias] ++ linear ++ nonlinear per row. `nonlinear` may have zero columns.
FeatureMatrix assemble_total(const FeatureMatrix& linear, ConstMatRef nonlinear,
                             std::optional<double> bias);

} // namespace anvar
