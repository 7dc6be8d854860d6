#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lfdbench/experiment.hpp"
#include "lfdbench/types.hpp"

namespace lfdbench {

struct PlotPoint {
  int demos = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  int n = 0;
};

struct PlotSeries {
  std::string name;
  std::vector<PlotPoint> points;  // sorted by demos
};

// Parse a results CSV and aggregate normalized performance per (algorithm,
// demos) cell: mean and standard error across trials. Failed rows (nonempty
// error column) are skipped; structural problems name the offending line.
inline std::vector<PlotSeries> aggregate_results_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("results CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultCsvHeader)
    throw ConfigError("results CSV: line 1: header mismatch, expected '" +
                      std::string(kResultCsvHeader) + "'");

  struct Cell {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, std::map<int, Cell>> cells;

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 8)
      throw ConfigError("results CSV: line " + std::to_string(line_no) + ": expected 8 fields, got " +
                        std::to_string(fields.size()));
    const std::string& algorithm = fields[1];
    if (algorithm.empty())
      throw ConfigError("results CSV: line " + std::to_string(line_no) + ": empty algorithm");
    if (!fields[7].empty()) continue;  // failed row, nothing to aggregate
    int demos = 0;
    double perf = 0.0;
    try {
      std::size_t used = 0;
      demos = std::stoi(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("demos");
      perf = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("norm_perf");
    } catch (const std::exception&) {
      throw ConfigError("results CSV: line " + std::to_string(line_no) +
                        ": unparsable demos or norm_perf");
    }
    if (!cells.count(algorithm)) order.push_back(algorithm);
    Cell& c = cells[algorithm][demos];
    c.sum += perf;
    c.sum_sq += perf * perf;
    ++c.n;
  }

  std::vector<PlotSeries> series;
  for (const std::string& name : order) {
    PlotSeries s;
    s.name = name;
    for (const auto& [demos, c] : cells[name]) {
      PlotPoint p;
      p.demos = demos;
      p.n = c.n;
      p.mean = c.sum / c.n;
      if (c.n > 1) {
        const double var = std::max(0.0, (c.sum_sq - c.sum * c.sum / c.n) / (c.n - 1));
        p.stderr_ = std::sqrt(var / c.n);
      }
      s.points.push_back(p);
    }
    series.push_back(std::move(s));
  }
  if (series.empty()) throw ConfigError("results CSV: no plottable rows");
  return series;
}

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline const char* series_color(const std::string& name, std::size_t index) {
  if (name == "hc") return "#2a6fb0";
  if (name == "rc") return "#c23b3b";
  static const char* palette[] = {"#3f8f4f", "#8e5fb0", "#b08b3f", "#5f8e8e"};
  return palette[index % 4];
}

}  // namespace detail

// Render the aggregated series as a fixed-layout SVG line chart: mean curve
// per algorithm with one-standard-error bars. Layout, colors, and number
// formatting are constant so identical input gives identical bytes.
inline std::string render_performance_svg(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw ConfigError("render_performance_svg: no series");
  const double width = 640.0, height = 420.0;
  const double x0 = 70.0, x1 = 470.0, y0 = 360.0, y1 = 40.0;  // y grows downward

  double dmin = 1e300, dmax = -1e300, vmin = 1e300, vmax = -1e300;
  for (const PlotSeries& s : series)
    for (const PlotPoint& p : s.points) {
      dmin = std::min(dmin, static_cast<double>(p.demos));
      dmax = std::max(dmax, static_cast<double>(p.demos));
      vmin = std::min(vmin, p.mean - p.stderr_);
      vmax = std::max(vmax, p.mean + p.stderr_);
    }
  if (dmax <= dmin) {
    dmin -= 1.0;
    dmax += 1.0;
  }
  const double vpad = (vmax - vmin) > 0.0 ? 0.05 * (vmax - vmin) : 0.05;
  vmin -= vpad;
  vmax += vpad;

  const auto sx = [&](double d) { return x0 + (d - dmin) / (dmax - dmin) * (x1 - x0); };
  const auto sy = [&](double v) { return y0 + (v - vmin) / (vmax - vmin) * (y1 - y0); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
         "viewBox=\"0 0 640 420\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"#ffffff\"/>\n";
  out += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
  out += "<text x=\"" + detail::svg_num((x0 + x1) / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">normalized performance vs "
         "demonstrations</text>\n";

  // axes
  out += "<line x1=\"" + detail::svg_num(x0) + "\" y1=\"" + detail::svg_num(y0) + "\" x2=\"" +
         detail::svg_num(x1) + "\" y2=\"" + detail::svg_num(y0) +
         "\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + detail::svg_num(x0) + "\" y1=\"" + detail::svg_num(y0) + "\" x2=\"" +
         detail::svg_num(x0) + "\" y2=\"" + detail::svg_num(y1) +
         "\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fd = dmin + (dmax - dmin) * i / 4.0;
    const double fx = sx(fd);
    out += "<line x1=\"" + detail::svg_num(fx) + "\" y1=\"" + detail::svg_num(y0) + "\" x2=\"" +
           detail::svg_num(fx) + "\" y2=\"" + detail::svg_num(y0 + 5) +
           "\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::svg_num(fx) + "\" y=\"" + detail::svg_num(y0 + 20) +
           "\" text-anchor=\"middle\">" + detail::tick_label(fd) + "</text>\n";
    const double fv = vmin + (vmax - vmin) * i / 4.0;
    const double fy = sy(fv);
    out += "<line x1=\"" + detail::svg_num(x0 - 5) + "\" y1=\"" + detail::svg_num(fy) + "\" x2=\"" +
           detail::svg_num(x0) + "\" y2=\"" + detail::svg_num(fy) +
           "\" stroke=\"#222222\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + detail::svg_num(x0 - 9) + "\" y=\"" + detail::svg_num(fy + 4) +
           "\" text-anchor=\"end\">" + detail::tick_label(fv) + "</text>\n";
  }
  out += "<text x=\"" + detail::svg_num((x0 + x1) / 2) + "\" y=\"" + detail::svg_num(y0 + 38) +
         "\" text-anchor=\"middle\">demonstrations</text>\n";
  out += "<text x=\"18\" y=\"" + detail::svg_num((y0 + y1) / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + detail::svg_num((y0 + y1) / 2) +
         ")\">normalized performance</text>\n";

  std::size_t idx = 0;
  for (const PlotSeries& s : series) {
    const std::string color = detail::series_color(s.name, idx);
    for (const PlotPoint& p : s.points) {
      if (p.stderr_ <= 0.0) continue;
      const double cx = sx(p.demos);
      const double lo = sy(p.mean - p.stderr_), hi = sy(p.mean + p.stderr_);
      out += "<line x1=\"" + detail::svg_num(cx) + "\" y1=\"" + detail::svg_num(lo) + "\" x2=\"" +
             detail::svg_num(cx) + "\" y2=\"" + detail::svg_num(hi) + "\" stroke=\"" + color +
             "\" stroke-width=\"1\"/>\n";
      for (const double y : {lo, hi})
        out += "<line x1=\"" + detail::svg_num(cx - 3) + "\" y1=\"" + detail::svg_num(y) +
               "\" x2=\"" + detail::svg_num(cx + 3) + "\" y2=\"" + detail::svg_num(y) +
               "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
    }
    if (s.points.size() > 1) {
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) out += ' ';
        out += detail::svg_num(sx(s.points[i].demos)) + ',' + detail::svg_num(sy(s.points[i].mean));
      }
      out += "\"/>\n";
    }
    for (const PlotPoint& p : s.points)
      out += "<circle cx=\"" + detail::svg_num(sx(p.demos)) + "\" cy=\"" +
             detail::svg_num(sy(p.mean)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    const double ly = y1 + 14 + 18.0 * static_cast<double>(idx);
    out += "<rect x=\"" + detail::svg_num(x1 + 16) + "\" y=\"" + detail::svg_num(ly - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + detail::svg_num(x1 + 34) + "\" y=\"" + detail::svg_num(ly + 1) + "\">" +
           s.name + "</text>\n";
    ++idx;
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline std::string plot_results_csv(const std::string& csv_text) {
  return render_performance_svg(aggregate_results_csv(csv_text));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw Error("read from '" + path + "' failed");
  return ss.str();
}

}  // namespace lfdbench
