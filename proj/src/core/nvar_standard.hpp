#pragma once

#include "features.hpp"
#include "timeseries.hpp"
#include "types.hpp"

#include <span>
#include <vector>

namespace anvar {

/// Forecast states whose magnitude crosses this abort the rollout; the
/// attractor lives well inside it.
inline constexpr double kDivergenceLimit = 1e6;

/// Delay embedding + quadratic monomials + closed-form ridge readout on state
/// increments.
struct StandardNvarModel {
  EmbeddingSpec spec;
  double gamma = 0.0;
  double bias = 1.0;
  Mat w_out; // d x (1 + dk + dk(dk+1)/2)

  Index feature_dim() const noexcept {
    return 1 + spec.linear_dim() + monomial_dim(spec.linear_dim());
  }
};

/// Fits the readout on difference targets X_{i+1} - X_i for i in
/// [max(first_index, fit_start), T-1). fit_start < 0 uses the first complete
/// embedding; the experiment protocol passes the warm-up length instead.
StandardNvarModel fit_standard(const TimeSeries& train, const EmbeddingSpec& spec, double gamma,
                               Index fit_start = -1, double bias = 1.0);

/// Closed-loop rollout: X_{i+1} = X_i + W_out H_total,i, feeding predictions
/// back into the delay buffer. warmup_window must hold exactly (k-1)s+1
/// trailing observed states. Throws DivergenceError when a component passes
/// the guard limit.
TimeSeries forecast(const StandardNvarModel& model, ConstMatRef warmup_window, Index horizon,
                    double dt = 0.0, double t0 = 0.0);

struct GridCandidate {
  Index k = 0;
  double gamma = 0.0;
  double val_rmse = 0.0;
};

struct GridSearchReport {
  std::vector<GridCandidate> candidates; // sorted ascending by val_rmse
  std::size_t best = 0;
  double wall_time_s = 0.0;
};

struct GridSearchOptions {
  Index s = 1;
  Index fit_start = -1;   // forwarded to fit_standard
  Index val_horizon = 50; // closed-loop restart length on the validation span
  bool refine = true;     // linear pass around the best coarse gamma
  int jobs = 1;
};

/// Fits every (k, gamma), scores mean closed-loop RMSE over fixed-length
/// restarts across the validation span, and returns candidates sorted by
/// score (ties: smaller k, then smaller gamma). Failed fits score infinity.
GridSearchReport grid_search(const TimeSeries& train, const TimeSeries& val,
                             std::span<const Index> k_range, std::span<const double> gamma_grid,
                             const GridSearchOptions& options = {});

/// The 40-point log grid on [1e-9, 1e3] used by the default search.
std::vector<double> default_gamma_grid();

} // namespace anvar
