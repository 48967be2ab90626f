#pragma once

#include "config.hpp"
#include "evaluation.hpp"
#include "nvar_standard.hpp"

#include <string>
#include <vector>

namespace anvar {

/// Generates the configured trajectory plus one noisy copy per noise level
/// (base seed), writing trajectory CSVs and a manifest under output_dir.
/// Returns the written file names.
std::vector<std::string> run_generate(const RunConfig& config);

/// Full experiment suite; writes results.csv, aggregate.csv and manifest.json
/// under output_dir.
SuiteOutput run_suite_to_dir(const RunConfig& config);

/// Observation-frequency study; writes results_s<N>.csv / aggregate_s<N>.csv
/// per skip value plus a manifest.
std::vector<std::pair<Index, SuiteOutput>> run_skip_study_to_dir(const RunConfig& config);

/// Grid search per the config's protocol (freshly generated data, noisy at
/// grid.noise, validation split from the tail of the training segment);
/// writes grid_report.csv and a manifest.
GridSearchReport run_grid_search_to_dir(const RunConfig& config);

/// Renders RMSE charts from an aggregate CSV into out_dir.
std::vector<std::string> run_plot(const std::string& aggregate_csv, const std::string& out_dir);

} // namespace anvar
