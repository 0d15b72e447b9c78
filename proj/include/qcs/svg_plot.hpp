#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "qcs/analysis.hpp"
#include "qcs/common.hpp"

namespace qcs {

namespace detail {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> xy;  // (x, mean error)
};

inline const char* kSeriesColors[] = {"#1f6fb4", "#e07b28", "#c24f9e",
                                      "#3c9d57", "#8a5fc4", "#b23a3a"};

}  // namespace detail

/// Log-log plot of mean reconstruction error, one series per (delta, dither)
/// key. Sweeps with more than one distinct m plot error against m with dashed
/// m^{-1/2} and m^{-1} guides anchored at the first grid point; single-m
/// sweeps plot against delta with dashed (1+delta)^{1/2} and (1+delta)
/// guides. Output is byte-deterministic for a given sweep.
inline void emit_plot(const SweepResult& sweep, const std::filesystem::path& out_path) {
  detail::require(!sweep.points.empty(), "emit_plot: empty sweep");

  std::set<Index> distinct_m;
  for (const PointStats& p : sweep.points) distinct_m.insert(p.m);
  const bool vs_m = distinct_m.size() > 1;

  std::map<std::pair<double, bool>, detail::PlotSeries> series;
  for (const PointStats& p : sweep.points) {
    auto& s = series[{p.delta, p.dither}];
    if (s.label.empty()) {
      s.label = vs_m ? ("delta=" + format_double(p.delta)) : "mean error";
      if (!p.dither) s.label += " (no dither)";
    }
    const double x = vs_m ? static_cast<double>(p.m) : p.delta;
    if (p.mean > 0.0) s.xy.emplace_back(x, p.mean);
  }
  detail::require(!series.empty(), "emit_plot: no plottable points");

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& [key, s] : series) {
    for (const auto& [x, y] : s.xy) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  detail::require(!first, "emit_plot: no positive mean errors to plot");

  // Reference guides anchored at the first point of the first plottable series.
  double x0 = 0.0, y0 = 0.0;
  for (const auto& [key, s] : series) {
    if (!s.xy.empty()) {
      x0 = s.xy.front().first;
      y0 = s.xy.front().second;
      break;
    }
  }
  auto ref_slow = [&](double x) {
    return vs_m ? y0 * std::sqrt(x0 / x) : y0 * std::sqrt((1.0 + x) / (1.0 + x0));
  };
  auto ref_fast = [&](double x) { return vs_m ? y0 * (x0 / x) : y0 * (1.0 + x) / (1.0 + x0); };
  for (double x : {xmin, xmax}) {
    for (double y : {ref_slow(x), ref_fast(x)}) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }

  const double width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 20, mb = 50;
  double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
  if (lx1 - lx0 < 1e-12) {  // single-point sweep
    lx0 -= 0.5;
    lx1 += 0.5;
  }
  const double ly0 = std::log10(ymin) - 0.05, ly1 = std::log10(ymax) + 0.05;
  auto px = [&](double x) {
    return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (height - mt - mb);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + format_fixed(ml, 1) + "\" y=\"" + format_fixed(mt, 1) + "\" width=\"" +
         format_fixed(width - ml - mr, 1) + "\" height=\"" + format_fixed(height - mt - mb, 1) +
         "\" fill=\"none\" stroke=\"#444444\"/>\n";

  // Decade ticks.
  for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
    const double x = px(std::pow(10.0, e));
    svg += "<line x1=\"" + format_fixed(x, 1) + "\" y1=\"" + format_fixed(height - mb, 1) +
           "\" x2=\"" + format_fixed(x, 1) + "\" y2=\"" + format_fixed(height - mb + 6, 1) +
           "\" stroke=\"#444444\"/>\n";
    svg += "<text x=\"" + format_fixed(x, 1) + "\" y=\"" + format_fixed(height - mb + 20, 1) +
           "\" font-size=\"12\" text-anchor=\"middle\">1e" + std::to_string(e) + "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
    const double y = py(std::pow(10.0, e));
    svg += "<line x1=\"" + format_fixed(ml - 6, 1) + "\" y1=\"" + format_fixed(y, 1) +
           "\" x2=\"" + format_fixed(ml, 1) + "\" y2=\"" + format_fixed(y, 1) +
           "\" stroke=\"#444444\"/>\n";
    svg += "<text x=\"" + format_fixed(ml - 10, 1) + "\" y=\"" + format_fixed(y + 4, 1) +
           "\" font-size=\"12\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"" + format_fixed(ml + (width - ml - mr) / 2, 1) + "\" y=\"" +
         format_fixed(height - 8, 1) + "\" font-size=\"13\" text-anchor=\"middle\">" +
         (vs_m ? "m" : "delta") + "</text>\n";
  svg += "<text x=\"16\" y=\"" + format_fixed(mt + (height - mt - mb) / 2, 1) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         format_fixed(mt + (height - mt - mb) / 2, 1) + ")\">mean error</text>\n";

  // Dashed reference guides.
  for (int ref = 0; ref < 2; ++ref) {
    std::string pts;
    const int segments = 32;
    for (int i = 0; i <= segments; ++i) {
      const double x = std::pow(10.0, lx0 + (lx1 - lx0) * i / segments);
      const double y = ref == 0 ? ref_slow(x) : ref_fast(x);
      pts += format_fixed(px(x), 2) + "," + format_fixed(py(y), 2) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"#888888\" stroke-dasharray=\"6 4\" points=\"" + pts +
           "\"/>\n";
  }

  int color = 0;
  double legend_y = mt + 16;
  for (const auto& [key, s] : series) {
    const char* stroke = detail::kSeriesColors[color % 6];
    ++color;
    std::string pts;
    for (const auto& [x, y] : s.xy) pts += format_fixed(px(x), 2) + "," + format_fixed(py(y), 2) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"1.5\" "
           "points=\"" + pts + "\"/>\n";
    for (const auto& [x, y] : s.xy)
      svg += "<circle cx=\"" + format_fixed(px(x), 2) + "\" cy=\"" + format_fixed(py(y), 2) +
             "\" r=\"3\" fill=\"" + std::string(stroke) + "\"/>\n";
    svg += "<text x=\"" + format_fixed(width - mr - 8, 1) + "\" y=\"" + format_fixed(legend_y, 1) +
           "\" font-size=\"12\" text-anchor=\"end\" fill=\"" + std::string(stroke) + "\">" +
           s.label + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";

  const std::filesystem::path tmp = out_path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("emit_plot: cannot open " + tmp.string());
    f << svg;
  }
  std::filesystem::rename(tmp, out_path);
}

}  // namespace qcs
