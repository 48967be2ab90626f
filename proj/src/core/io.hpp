#pragma once

#include "adaptive.hpp"
#include "evaluation.hpp"
#include "nvar_standard.hpp"
#include "timeseries.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace anvar {

/// Full round-trip precision (17 significant digits).
std::string fmt_full(double v);
/// Compact label formatting for identifying columns (noise levels, gammas).
std::string fmt_label(double v);

/// Trajectory CSV: header `t,x,y,z` for 3-dimensional series (generic
/// component names otherwise), one row per grid time, full precision.
void save_series_csv(const TimeSeries& series, const std::string& path);
TimeSeries load_series_csv(const std::string& path);

/// Grid report CSV: `k,gamma,val_rmse`, candidates in report order.
void save_grid_report_csv(const GridSearchReport& report, const std::string& path);

/// Per-run results CSV: `model,noise,seed,horizon,component,rmse`.
void save_results_csv(const std::vector<ExperimentResult>& results, const std::string& path);

/// Aggregate CSV: `model,noise,horizon,component,mean,std`.
void save_aggregate_csv(const std::vector<AggregateRow>& table, const std::string& path);
std::vector<AggregateRow> load_aggregate_csv(const std::string& path);

/// Training trace CSV: `phase,iter,loss`.
void save_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

/// Checkpoints are a flat little-endian binary (magic, tensor count, then
/// name/rank/dims/row-major doubles per tensor) plus a JSON sidecar at
/// `path + ".json"` carrying shapes and hyperparameters.
void save_adaptive_model(const AdaptiveNvarModel& model, const std::string& path);
AdaptiveNvarModel load_adaptive_model(const std::string& path);
void save_standard_model(const StandardNvarModel& model, const std::string& path);
StandardNvarModel load_standard_model(const std::string& path);

/// Git-style blob hash: sha1("blob <size>\0" + content), hex.
std::string git_blob_sha1_hex(std::string_view content);

/// Writes `manifest.json` into dir: the config echo, wall time, and a content
/// hash per output file (sorted, manifest itself excluded).
void write_manifest(const std::string& dir, const std::string& config_json,
                    double wall_seconds);

} // namespace anvar
