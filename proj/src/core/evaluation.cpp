#include "evaluation.hpp"

#include "error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

namespace anvar {

Vec rmse(const TimeSeries& forecast, const TimeSeries& truth, Index horizon) {
  if (horizon < 1) throw InvalidArgumentError("rmse horizon must be >= 1");
  if (forecast.dim() != truth.dim())
    throw DimensionError("forecast and truth dimensions differ");
  if (forecast.rows() < horizon || truth.rows() < horizon)
    throw DimensionError("series shorter than the requested horizon (" +
                         std::to_string(forecast.rows()) + "/" + std::to_string(truth.rows()) +
                         " rows, horizon " + std::to_string(horizon) + ")");
  Vec out(forecast.dim());
  for (Index j = 0; j < forecast.dim(); ++j) {
    const auto diff = forecast.data.col(j).head(horizon) - truth.data.col(j).head(horizon);
    out[j] = std::sqrt(diff.squaredNorm() / static_cast<double>(horizon));
  }
  return out;
}

std::vector<AggregateRow> aggregate(std::vector<ExperimentResult> results) {
  // Canonical order first so the moments are summation-order independent.
  std::sort(results.begin(), results.end(),
            [](const ExperimentResult& a, const ExperimentResult& b) {
              return std::tie(a.model, a.noise, a.horizon, a.seed) <
                     std::tie(b.model, b.noise, b.horizon, b.seed);
            });

  std::vector<AggregateRow> table;
  for (std::size_t i = 0; i < results.size();) {
    const auto& head = results[i];
    std::size_t j = i;
    while (j < results.size() && results[j].model == head.model &&
           results[j].noise == head.noise && results[j].horizon == head.horizon)
      ++j;

    AggregateRow row;
    row.model = head.model;
    row.noise = head.noise;
    row.horizon = head.horizon;
    Index d = 0;
    for (std::size_t r = i; r < j; ++r)
      if (!results[r].failed) d = results[r].per_component_rmse.size();
    row.mean = Vec::Zero(d);
    row.stddev = Vec::Zero(d);
    for (std::size_t r = i; r < j; ++r) {
      if (results[r].failed) {
        ++row.failures;
        continue;
      }
      row.mean += results[r].per_component_rmse;
      ++row.seed_count;
    }
    if (row.seed_count > 0) {
      row.mean /= static_cast<double>(row.seed_count);
      for (std::size_t r = i; r < j; ++r)
        if (!results[r].failed)
          row.stddev.array() +=
              (results[r].per_component_rmse - row.mean).array().square();
      row.stddev = (row.stddev / static_cast<double>(row.seed_count)).cwiseSqrt();
    }
    table.push_back(std::move(row));
    i = j;
  }
  return table;
}

namespace {

struct CellSpec {
  std::string model;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

std::string standard_snapshot(const StandardConfig& sc, Index s) {
  std::ostringstream os;
  os << "k=" << sc.k << ";gamma=" << sc.gamma << ";s=" << s;
  return os.str();
}

std::string adaptive_snapshot(const RunConfig& cfg, Index k, Index m, double dropout) {
  std::ostringstream os;
  os << "k=" << k << ";s=" << cfg.adaptive_s << ";hidden=" << cfg.hidden << ";m=" << m
     << ";dropout=" << dropout << ";lr=" << cfg.adam_lr << ";epochs=" << cfg.adam_epochs;
  return os.str();
}

// Runs every (model, noise, seed) cell against `clean` split as
// warmup/train/test, scoring closed-loop forecasts on the clean test span.
std::vector<ExperimentResult> run_cells(const RunConfig& cfg, const TimeSeries& clean,
                                        Index warmup, Index train_len, Index test_len,
                                        const std::vector<double>& noise_levels,
                                        const std::vector<Index>& horizons) {
  const Index observed_len = warmup + train_len;
  const Index max_horizon = *std::max_element(horizons.begin(), horizons.end());
  if (test_len < max_horizon)
    throw ConfigError("test span shorter than the largest horizon");
  if (clean.rows() < observed_len + test_len)
    throw ConfigError("series shorter than warmup+train+test");
  const TimeSeries truth = slice(clean, observed_len, test_len);

  std::vector<CellSpec> cells;
  for (const double noise : noise_levels)
    for (Index i = 0; i < cfg.seeds; ++i) {
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
      if (cfg.run_standard) cells.push_back({"standard", noise, seed});
      if (cfg.run_adaptive) cells.push_back({"adaptive", noise, seed});
    }

  std::vector<std::vector<ExperimentResult>> slots(cells.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t ci) {
    const CellSpec& cell = cells[ci];
    const TimeSeries noisy =
        add_noise(clean, {cell.noise, cfg.noise_mode, cell.seed});
    const TimeSeries observed = slice(noisy, 0, observed_len);

    std::string snapshot;
    TimeSeries fc;
    bool ok = true;
    try {
      if (cell.model == "standard") {
        const StandardConfig sc = cfg.standard_for(cell.noise);
        snapshot = standard_snapshot(sc, cfg.standard_s);
        const EmbeddingSpec spec{sc.k, cfg.standard_s, clean.dim()};
        StandardNvarModel model =
            fit_standard(observed, spec, sc.gamma, warmup, cfg.standard_bias);
        const Mat window =
            observed.data.bottomRows(spec.window_rows());
        fc = forecast(model, window, max_horizon, clean.dt, truth.t0);
      } else {
        const Index k = cell.noise == 0.0 ? cfg.adaptive_k_clean : cfg.adaptive_k_noisy;
        const double dropout = cell.noise == 0.0 ? 0.0 : cfg.dropout;
        const EmbeddingSpec spec{k, cfg.adaptive_s, clean.dim()};
        const Index m = cfg.mlp_output < 0 ? monomial_dim(spec.linear_dim()) : cfg.mlp_output;
        snapshot = adaptive_snapshot(cfg, k, m, dropout);
        AdaptiveNvarModel model = make_adaptive(spec, cfg.hidden, m, dropout, cell.seed);
        TrainConfig tc;
        tc.adam_lr = cfg.adam_lr;
        tc.adam_epochs = cfg.adam_epochs;
        tc.lbfgs_max_iters = cfg.lbfgs_max_iters;
        tc.lbfgs_memory = cfg.lbfgs_memory;
        tc.fit_start = warmup;
        tc.seed = cell.seed;
        train(model, observed, tc);
        const Mat window = observed.data.bottomRows(spec.window_rows());
        fc = forecast(model, window, max_horizon, clean.dt, truth.t0);
      }
    } catch (const Error&) {
      ok = false;
    }

    auto& out = slots[ci];
    out.reserve(horizons.size());
    for (const Index h : horizons) {
      ExperimentResult r;
      r.model = cell.model;
      r.noise = cell.noise;
      r.seed = static_cast<long>(cell.seed);
      r.horizon = h;
      r.config = snapshot;
      if (ok)
        r.per_component_rmse = rmse(fc, truth, h);
      else
        r.failed = true;
      out.push_back(std::move(r));
    }
  });

  std::vector<ExperimentResult> results;
  for (auto& slot : slots)
    for (auto& r : slot) results.push_back(std::move(r));
  return results;
}

} // namespace

SuiteOutput run_suite(const RunConfig& cfg) {
  cfg.validate();
  const OdeSystem sys = lorenz63(cfg.system);
  Vec x0 = Eigen::Map<const Vec>(cfg.x0.data(), static_cast<Index>(cfg.x0.size()));
  const TimeSeries clean =
      integrate_rk23(sys, x0, cfg.dt, cfg.total_rows() - 1, cfg.integrator_tol);

  SuiteOutput out;
  out.results = run_cells(cfg, clean, cfg.warmup, cfg.train_len, cfg.test_len,
                          cfg.noise_levels, cfg.horizons);
  out.table = aggregate(out.results);
  return out;
}

std::vector<std::pair<Index, SuiteOutput>> skip_study(const RunConfig& cfg) {
  cfg.validate();
  const OdeSystem sys = lorenz63(cfg.system);
  Vec x0 = Eigen::Map<const Vec>(cfg.x0.data(), static_cast<Index>(cfg.x0.size()));
  const TimeSeries clean =
      integrate_rk23(sys, x0, cfg.dt, cfg.total_rows() - 1, cfg.integrator_tol);

  std::vector<std::pair<Index, SuiteOutput>> out;
  for (const Index s : cfg.skip_values) {
    if (s < 1) throw ConfigError("skip_study s values must be >= 1");
    const TimeSeries coarse = decimate(clean, s);
    const Index warmup = cfg.warmup / s;
    const Index test_len = cfg.test_len / s;
    const Index train_len = coarse.rows() - warmup - test_len;
    std::vector<Index> horizons;
    for (const Index h : cfg.skip_horizons)
      if (h <= test_len) horizons.push_back(h);
    if (horizons.empty())
      throw ConfigError("skip_study horizons exceed the decimated test span");

    SuiteOutput run;
    run.results = run_cells(cfg, coarse, warmup, train_len, test_len, {cfg.skip_noise},
                            horizons);
    run.table = aggregate(run.results);
    out.emplace_back(s, std::move(run));
  }
  return out;
}

} // namespace anvar
