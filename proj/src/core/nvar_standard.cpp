#include "nvar_standard.hpp"

#include "error.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace anvar {

namespace {

// Samples usable for one-step-ahead fitting: embedded rows with a target.
struct FitSlices {
  Mat features; // n x f, total feature rows
  Mat targets;  // n x d, increments
};

FitSlices build_fit_slices(const TimeSeries& train, const EmbeddingSpec& spec, Index fit_start,
                           double bias) {
  const Index start = std::max(spec.first_index(), fit_start < 0 ? Index{0} : fit_start);
  if (train.rows() < start + 2)
    throw SeriesTooShortError("training series has " + std::to_string(train.rows()) +
                              " rows; need at least " + std::to_string(start + 2) +
                              " for embedding plus one-step targets");

  const FeatureMatrix lin = delay_embed(train, spec);
  const Index first = start - lin.first_time_index; // row offset inside the embedding
  const Index n = train.rows() - 1 - start;         // samples i = start .. T-2

  FitSlices out;
  const Mat lin_rows = lin.rows.middleRows(first, n);
  FeatureMatrix lin_slice{lin_rows, lin.layout, start};
  out.features = assemble_total(lin_slice, quadratic_monomials_rows(lin_rows), bias).rows;
  out.targets = train.data.middleRows(start + 1, n) - train.data.middleRows(start, n);
  return out;
}

} // namespace

StandardNvarModel fit_standard(const TimeSeries& train, const EmbeddingSpec& spec, double gamma,
                               Index fit_start, double bias) {
  spec.validate();
  FitSlices s = build_fit_slices(train, spec, fit_start, bias);
  StandardNvarModel model{spec, gamma, bias, {}};
  model.w_out = ridge_solve(s.features.transpose(), s.targets.transpose(), gamma);
  return model;
}

TimeSeries forecast(const StandardNvarModel& model, ConstMatRef warmup_window, Index horizon,
                    double dt, double t0) {
  const EmbeddingSpec& spec = model.spec;
  if (horizon < 0) throw InvalidArgumentError("forecast horizon must be >= 0");
  if (warmup_window.rows() != spec.window_rows() || warmup_window.cols() != spec.d)
    throw DimensionError("warm-up window must be " + std::to_string(spec.window_rows()) + "x" +
                         std::to_string(spec.d) + ", got " +
                         std::to_string(warmup_window.rows()) + "x" +
                         std::to_string(warmup_window.cols()));
  if (model.w_out.rows() != spec.d || model.w_out.cols() != model.feature_dim())
    throw DimensionError("readout shape does not match the embedding spec");

  TimeSeries out;
  out.data.resize(horizon, spec.d);
  out.dt = dt;
  out.t0 = t0;

  Mat window = warmup_window;
  Vec lin(spec.linear_dim());
  Vec total(model.feature_dim());
  for (Index step = 0; step < horizon; ++step) {
    const Index last = window.rows() - 1;
    for (Index delay = 0; delay < spec.k; ++delay)
      lin.segment(delay * spec.d, spec.d) = window.row(last - delay * spec.s);
    total[0] = model.bias;
    total.segment(1, lin.size()) = lin;
    total.tail(monomial_dim(lin.size())) = quadratic_monomials(lin);

    Vec next = window.row(last).transpose() + model.w_out * total;
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit)
      throw DivergenceError("forecast diverged at step " + std::to_string(step + 1),
                            static_cast<long>(step + 1));
    out.data.row(step) = next.transpose();
    // Roll the delay buffer.
    for (Index r = 0; r < last; ++r) window.row(r) = window.row(r + 1);
    window.row(last) = next.transpose();
  }
  return out;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid(40);
  for (int i = 0; i < 40; ++i)
    grid[static_cast<std::size_t>(i)] = std::pow(10.0, -9.0 + 12.0 * i / 39.0);
  return grid;
}

namespace {

double validation_rmse(const StandardNvarModel& model, const TimeSeries& train,
                       const TimeSeries& val, Index horizon) {
  const Index wr = model.spec.window_rows();
  const Index restarts = val.rows() / horizon;
  Mat all(train.rows() + val.rows(), train.dim());
  all << train.data, val.data;

  double sq_sum = 0.0;
  Index count = 0;
  for (Index r = 0; r < restarts; ++r) {
    const Index origin = train.rows() + r * horizon; // first forecast row in `all`
    if (origin < wr) continue;
    const Mat window = all.middleRows(origin - wr, wr);
    TimeSeries fc = forecast(model, window, horizon, val.dt, 0.0);
    sq_sum += (fc.data - all.middleRows(origin, horizon)).squaredNorm();
    count += horizon * train.dim();
  }
  if (count == 0)
    throw InvalidArgumentError("validation span shorter than one forecast horizon");
  return std::sqrt(sq_sum / static_cast<double>(count));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

GridSearchReport grid_search(const TimeSeries& train, const TimeSeries& val,
                             std::span<const Index> k_range, std::span<const double> gamma_grid,
                             const GridSearchOptions& options) {
  if (k_range.empty() || gamma_grid.empty())
    throw InvalidArgumentError("grid search needs nonempty k and gamma ranges");
  if (val.rows() < options.val_horizon)
    throw InvalidArgumentError("validation span shorter than the scoring horizon");
  const auto t_begin = std::chrono::steady_clock::now();

  std::vector<GridCandidate> cells(k_range.size() * gamma_grid.size());
  parallel_for(k_range.size(), options.jobs, [&](std::size_t ki) {
    const Index k = k_range[ki];
    const EmbeddingSpec spec{k, options.s, train.dim()};
    FitSlices slices;
    bool embed_ok = true;
    try {
      slices = build_fit_slices(train, spec, options.fit_start, 1.0);
    } catch (const Error&) {
      embed_ok = false;
    }
    Mat gram, cross;
    if (embed_ok) {
      gram.noalias() = slices.features.transpose() * slices.features;
      cross.noalias() = slices.targets.transpose() * slices.features;
    }
    for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
      const double gamma = gamma_grid[gi];
      GridCandidate cell{k, gamma, kInf};
      if (embed_ok) {
        try {
          StandardNvarModel model{spec, gamma, 1.0, ridge_solve_gram(gram, cross, gamma)};
          cell.val_rmse = validation_rmse(model, train, val, options.val_horizon);
        } catch (const Error&) {
          cell.val_rmse = kInf;
        }
      }
      cells[ki * gamma_grid.size() + gi] = cell;
    }
  });

  auto better = [](const GridCandidate& a, const GridCandidate& b) {
    const double ra = std::isnan(a.val_rmse) ? kInf : a.val_rmse;
    const double rb = std::isnan(b.val_rmse) ? kInf : b.val_rmse;
    if (ra != rb) return ra < rb;
    if (a.k != b.k) return a.k < b.k;
    return a.gamma < b.gamma;
  };

  if (options.refine) {
    // Linear pass across the coarse cell around the best gamma, at the best k.
    const auto coarse_best =
        static_cast<std::size_t>(std::min_element(cells.begin(), cells.end(), better) -
                                 cells.begin());
    const Index best_k = cells[coarse_best].k;
    const double best_gamma = cells[coarse_best].gamma;
    std::vector<double> sorted_gammas(gamma_grid.begin(), gamma_grid.end());
    std::sort(sorted_gammas.begin(), sorted_gammas.end());
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(sorted_gammas.begin(), sorted_gammas.end(), best_gamma) -
        sorted_gammas.begin());
    const double lo = pos == 0 ? best_gamma / 2.0 : sorted_gammas[pos - 1];
    const double hi =
        pos + 1 >= sorted_gammas.size() ? best_gamma * 2.0 : sorted_gammas[pos + 1];

    const EmbeddingSpec spec{best_k, options.s, train.dim()};
    try {
      FitSlices slices = build_fit_slices(train, spec, options.fit_start, 1.0);
      Mat gram = slices.features.transpose() * slices.features;
      Mat cross = slices.targets.transpose() * slices.features;
      constexpr int kRefinePoints = 9;
      for (int i = 1; i <= kRefinePoints; ++i) {
        const double gamma = lo + (hi - lo) * i / (kRefinePoints + 1);
        GridCandidate cell{best_k, gamma, kInf};
        try {
          StandardNvarModel model{spec, gamma, 1.0, ridge_solve_gram(gram, cross, gamma)};
          cell.val_rmse = validation_rmse(model, train, val, options.val_horizon);
        } catch (const Error&) {
        }
        cells.push_back(cell);
      }
    } catch (const Error&) {
      // refinement is best-effort; the coarse grid already covers the range
    }
  }

  std::sort(cells.begin(), cells.end(), better);
  GridSearchReport report;
  report.candidates = std::move(cells);
  report.best = 0;
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return report;
}

} // namespace anvar
