#pragma once

#include "evaluation.hpp"

#include <string>
#include <vector>

namespace anvar {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points; // (x, y), y > 0 for log axis
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Static line chart with a log10 y-axis (linear fallback when values are not
/// all positive). Layout is fixed and deterministic: same inputs, same bytes.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<ChartSeries>& series);

/// One RMSE-vs-horizon chart per noise level found in the aggregate table,
/// written as `<prefix>noise<level>.svg` under out_dir. Returns the paths.
std::vector<std::string> render_rmse_charts(const std::vector<AggregateRow>& table,
                                            const std::string& out_dir,
                                            const std::string& prefix = "rmse_");

} // namespace anvar
