#pragma once

#include "adaptive.hpp"
#include "config.hpp"
#include "nvar_standard.hpp"
#include "timeseries.hpp"

#include <string>
#include <vector>

namespace anvar {

/// Per-component sqrt of mean squared error over the first `horizon` steps.
Vec rmse(const TimeSeries& forecast, const TimeSeries& truth, Index horizon);

/// One (model, noise, seed, horizon) cell.
struct ExperimentResult {
  std::string model;
  double noise = 0.0;
  long seed = 0;
  Index horizon = 0;
  Vec per_component_rmse; // empty when failed
  bool failed = false;
  std::string config; // short snapshot of the cell's configuration
};

/// Mean and population std over the seeds of a cell; failures are counted and
/// excluded from the moments.
struct AggregateRow {
  std::string model;
  double noise = 0.0;
  Index horizon = 0;
  Vec mean;
  Vec stddev;
  int seed_count = 0;
  int failures = 0;
};

/// Groups by (model, noise, horizon). Results are re-sorted internally, so the
/// aggregate is independent of input order (including summation order).
std::vector<AggregateRow> aggregate(std::vector<ExperimentResult> results);

struct SuiteOutput {
  std::vector<ExperimentResult> results;
  std::vector<AggregateRow> table;
};

/// Full noise x seed x horizon cross-product on freshly generated data, per
/// the configured protocol. Individual run failures are recorded in the
/// results, not fatal. Deterministic given the seed list; cells run on the
/// configured job count.
SuiteOutput run_suite(const RunConfig& config);

/// Observation-frequency study: the series is decimated by each s (splits and
/// grid spacing scale accordingly) and the suite machinery reruns at the
/// configured fixed noise level with s=1 embeddings on the coarse grid.
std::vector<std::pair<Index, SuiteOutput>> skip_study(const RunConfig& config);

} // namespace anvar
