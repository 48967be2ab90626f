#include "runner.hpp"

#include "error.hpp"
#include "io.hpp"
#include "svg.hpp"

#include <chrono>
#include <filesystem>

namespace anvar {

namespace fs = std::filesystem;

namespace {

class WallClock {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

TimeSeries generate_clean(const RunConfig& cfg) {
  const OdeSystem sys = lorenz63(cfg.system);
  Vec x0 = Eigen::Map<const Vec>(cfg.x0.data(), static_cast<Index>(cfg.x0.size()));
  return integrate_rk23(sys, x0, cfg.dt, cfg.total_rows() - 1, cfg.integrator_tol);
}

} // namespace

std::vector<std::string> run_generate(const RunConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  const TimeSeries clean = generate_clean(cfg);

  std::vector<std::string> written;
  fs::create_directories(cfg.output_dir);
  const auto emit = [&](const TimeSeries& series, const std::string& name) {
    save_series_csv(series, (fs::path(cfg.output_dir) / name).string());
    written.push_back(name);
  };
  emit(clean, "trajectory.csv");
  for (const double noise : cfg.noise_levels) {
    if (noise == 0.0) continue;
    const TimeSeries noisy = add_noise(clean, {noise, cfg.noise_mode, cfg.base_seed});
    emit(noisy, "trajectory_noise" + std::string(fmt_label(noise * 100.0)) + ".csv");
  }
  write_manifest(cfg.output_dir, config_to_json(cfg), clock.seconds());
  return written;
}

SuiteOutput run_suite_to_dir(const RunConfig& cfg) {
  const WallClock clock;
  SuiteOutput out = run_suite(cfg);
  fs::create_directories(cfg.output_dir);
  save_results_csv(out.results, (fs::path(cfg.output_dir) / "results.csv").string());
  save_aggregate_csv(out.table, (fs::path(cfg.output_dir) / "aggregate.csv").string());
  write_manifest(cfg.output_dir, config_to_json(cfg), clock.seconds());
  return out;
}

std::vector<std::pair<Index, SuiteOutput>> run_skip_study_to_dir(const RunConfig& cfg) {
  const WallClock clock;
  auto runs = skip_study(cfg);
  fs::create_directories(cfg.output_dir);
  for (const auto& [s, run] : runs) {
    const std::string tag = "_s" + std::to_string(s);
    save_results_csv(run.results,
                     (fs::path(cfg.output_dir) / ("results" + tag + ".csv")).string());
    save_aggregate_csv(run.table,
                       (fs::path(cfg.output_dir) / ("aggregate" + tag + ".csv")).string());
  }
  write_manifest(cfg.output_dir, config_to_json(cfg), clock.seconds());
  return runs;
}

GridSearchReport run_grid_search_to_dir(const RunConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  const TimeSeries clean = generate_clean(cfg);
  const TimeSeries noisy = add_noise(clean, {cfg.grid.noise, cfg.noise_mode, cfg.base_seed});

  // Validation split: tail share of the training segment; fitting sees the
  // warm-up prefix but samples start at the warm-up boundary.
  const Index observed_len = cfg.warmup + cfg.train_len;
  const Index val_len = static_cast<Index>(static_cast<double>(cfg.train_len) *
                                           cfg.grid.val_fraction);
  if (val_len < cfg.grid.val_horizon)
    throw ConfigError("validation split shorter than the scoring horizon");
  const TimeSeries fit_part = slice(noisy, 0, observed_len - val_len);
  const TimeSeries val_part = slice(noisy, observed_len - val_len, val_len);

  std::vector<Index> ks;
  for (Index k = cfg.grid.k_min; k <= cfg.grid.k_max; ++k) ks.push_back(k);
  const std::vector<double> gammas =
      cfg.grid.gammas.empty() ? default_gamma_grid() : cfg.grid.gammas;

  GridSearchOptions options;
  options.s = cfg.standard_s;
  options.fit_start = cfg.warmup;
  options.val_horizon = cfg.grid.val_horizon;
  options.refine = cfg.grid.refine;
  options.jobs = cfg.jobs;
  GridSearchReport report = grid_search(fit_part, val_part, ks, gammas, options);

  fs::create_directories(cfg.output_dir);
  save_grid_report_csv(report, (fs::path(cfg.output_dir) / "grid_report.csv").string());
  write_manifest(cfg.output_dir, config_to_json(cfg), clock.seconds());
  return report;
}

std::vector<std::string> run_plot(const std::string& aggregate_csv,
                                  const std::string& out_dir) {
  const auto table = load_aggregate_csv(aggregate_csv);
  fs::create_directories(out_dir);
  return render_rmse_charts(table, out_dir);
}

} // namespace anvar
