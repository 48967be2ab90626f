#include "svg.hpp"

#include "error.hpp"
#include "io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace anvar {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 180, kTop = 50, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

} // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<ChartSeries>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  bool log_ok = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
      if (!(y > 0.0)) log_ok = false;
    }
  if (first) throw InvalidArgumentError("chart has no data points");
  if (xmax == xmin) xmax = xmin + 1;

  // Log axis padded to whole decades; linear axis padded 5%.
  double lo, hi;
  if (log_ok) {
    lo = std::floor(std::log10(ymin));
    hi = std::ceil(std::log10(ymax));
    if (hi == lo) hi = lo + 1;
  } else {
    const double pad = 0.05 * (ymax - ymin + 1e-12);
    lo = ymin - pad;
    hi = ymax + pad;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) {
    const double t = log_ok ? (std::log10(y) - lo) / (hi - lo) : (y - lo) / (hi - lo);
    return kTop + (1.0 - t) * plot_h;
  };

  if (const auto parent = std::filesystem::path(path).parent_path(); !parent.empty())
    std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // Axes box.
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(plot_w)
      << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // Y ticks: decades on a log axis, five even steps otherwise.
  if (log_ok) {
    for (double e = lo; e <= hi + 1e-9; e += 1.0) {
      const double y = py(std::pow(10.0, e));
      out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\""
          << num(kLeft + plot_w) << "\" y2=\"" << num(y)
          << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e"
          << static_cast<int>(e) << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double v = lo + (hi - lo) * i / 5.0;
      const double y = py(v);
      out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\""
          << num(kLeft + plot_w) << "\" y2=\"" << num(y)
          << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
      out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << fmt_label(v) << "</text>\n";
    }
  }

  // X ticks at the distinct sample positions.
  std::set<double> xs;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) xs.insert(x);
  for (const double x : xs) {
    out << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\""
        << num(px(x)) << "\" y2=\"" << num(kTop + plot_h + 5) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_label(x) << "</text>\n";
  }

  out << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << num(kTop + plot_h / 2) << ")\">" << y_label << "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
    if (s.dashed) out << " stroke-dasharray=\"6,4\"";
    out << " points=\"";
    for (const auto& [x, y] : s.points) out << num(px(x)) << "," << num(py(y)) << " ";
    out << "\"/>\n";
    for (const auto& [x, y] : s.points)
      out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";

    const double lx = kLeft + plot_w + 14;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(legend_y) << "\" x2=\""
        << num(lx + 26) << "\" y2=\"" << num(legend_y) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
        << "/>\n";
    out << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(legend_y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<std::string> render_rmse_charts(const std::vector<AggregateRow>& table,
                                            const std::string& out_dir,
                                            const std::string& prefix) {
  std::set<double> levels;
  for (const auto& row : table) levels.insert(row.noise);
  if (levels.empty()) throw InvalidArgumentError("aggregate table is empty");

  const char* colors[3] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  std::vector<std::string> written;
  for (const double noise : levels) {
    std::vector<ChartSeries> series;
    for (const std::string model : {"adaptive", "standard"}) {
      Index d = 0;
      for (const auto& row : table)
        if (row.noise == noise && row.model == model) d = row.mean.size();
      for (Index j = 0; j < d; ++j) {
        ChartSeries s;
        const std::string comp =
            d == 3 ? std::string{j == 0 ? "x" : j == 1 ? "y" : "z"} : "c" + std::to_string(j);
        s.label = model + " " + comp;
        s.color = colors[j % 3];
        s.dashed = model == "standard";
        for (const auto& row : table)
          if (row.noise == noise && row.model == model && row.mean.size() > j &&
              row.mean[j] > 0.0)
            s.points.emplace_back(static_cast<double>(row.horizon), row.mean[j]);
        std::sort(s.points.begin(), s.points.end());
        if (!s.points.empty()) series.push_back(std::move(s));
      }
    }
    if (series.empty()) continue;
    const std::string label = fmt_label(noise * 100.0);
    const std::string path =
        (std::filesystem::path(out_dir) / (prefix + "noise" + label + ".svg")).string();
    write_line_chart_svg(path, "Forecast RMSE vs horizon, " + label + "% noise",
                         "horizon (steps)", "RMSE", series);
    written.push_back(path);
  }
  return written;
}

} // namespace anvar
