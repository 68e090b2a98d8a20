// Copyright 2026 The lindground Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lindground::cli {

inline constexpr const char* kCsvHeader =
    "step,time,h_time,a_gates,energy_mean,energy_se,overlap_mean,overlap_se";

/// Raised for unreadable or structurally invalid CSV input.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int index_of(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] == name) return static_cast<int>(k);
    }
    return -1;
  }

  std::vector<double> column(const std::string& name) const {
    const int k = index_of(name);
    if (k < 0) throw CsvError("missing column \"" + name + "\"");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).empty()) throw CsvError(path + " is empty");
  t.columns = split_csv_line(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != t.columns.size()) {
      throw CsvError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                     " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw CsvError(path + ":" + std::to_string(lineno) + ": not a number: \"" + c + "\"");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw CsvError(path + " has no data rows");
  return t;
}

struct PlotKind {
  std::string x;
  std::string y;
  std::string x_label;
  std::string y_label;
};

inline const std::map<std::string, PlotKind>& plot_kinds() {
  static const std::map<std::string, PlotKind> kinds = {
      {"energy-time", {"time", "energy", "Lindblad simulation time", "energy"}},
      {"overlap-time", {"time", "overlap", "Lindblad simulation time", "ground-state overlap"}},
      {"energy-htime", {"h_time", "energy", "Hamiltonian simulation time", "energy"}},
      {"overlap-htime", {"h_time", "overlap", "Hamiltonian simulation time", "ground-state overlap"}},
  };
  return kinds;
}

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> se;
};

inline Series series_from_csv(const CsvTable& t, const PlotKind& kind, const std::string& label) {
  Series s;
  s.label = label;
  s.x = t.column(kind.x);
  s.mean = t.column(kind.y + "_mean");
  s.se = t.column(kind.y + "_se");
  return s;
}

namespace detail {

inline std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

inline std::string tick_label(double v, double step) {
  char buf[64];
  if (std::abs(v) < 1e-12 * std::max(1.0, step)) v = 0.0;
  if (step >= 1.0 && std::abs(v) < 1e6) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else if (std::abs(v) >= 1e6) {
    std::snprintf(buf, sizeof buf, "%.1e", v);
  } else {
    const int digits = std::max(0, static_cast<int>(std::ceil(-std::log10(step))));
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  }
  return buf;
}

inline double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Renders line plots with shaded +-1 SE bands. The output depends only on the
/// input values, so identical input gives identical bytes.
inline std::string render_svg(const std::vector<Series>& series, const PlotKind& kind, const std::string& title) {
  const double width = 760, height = 480, left = 80, right = 180, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      x0 = std::min(x0, s.x[k]);
      x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.mean[k] - s.se[k]);
      y1 = std::max(y1, s.mean[k] + s.se[k]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << detail::fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << detail::escape(title) << "</text>\n";

  const double xs = detail::nice_step(x1 - x0, 6), ys = detail::nice_step(y1 - y0, 6);
  o << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    o << "<line x1=\"" << detail::fmt(px(t)) << "\" y1=\"" << detail::fmt(top) << "\" x2=\"" << detail::fmt(px(t))
      << "\" y2=\"" << detail::fmt(top + ph) << "\"/>\n";
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    o << "<line x1=\"" << detail::fmt(left) << "\" y1=\"" << detail::fmt(py(t)) << "\" x2=\""
      << detail::fmt(left + pw) << "\" y2=\"" << detail::fmt(py(t)) << "\"/>\n";
  }
  o << "</g>\n<g fill=\"#333333\">\n";
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
    o << "<text x=\"" << detail::fmt(px(t)) << "\" y=\"" << detail::fmt(top + ph + 18)
      << "\" text-anchor=\"middle\">" << detail::tick_label(t, xs) << "</text>\n";
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
    o << "<text x=\"" << detail::fmt(left - 8) << "\" y=\"" << detail::fmt(py(t) + 4)
      << "\" text-anchor=\"end\">" << detail::tick_label(t, ys) << "</text>\n";
  }
  o << "</g>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  o << "<text x=\"" << detail::fmt(left + pw / 2) << "\" y=\"" << detail::fmt(height - 16)
    << "\" text-anchor=\"middle\">" << detail::escape(kind.x_label) << "</text>\n";
  o << "<text transform=\"translate(20," << detail::fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::escape(kind.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = palette[k % 6];
    o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      o << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.mean[i] + s.se[i])) << ' ';
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      o << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.mean[i] - s.se[i])) << (i ? " " : "");
    }
    o << "\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      o << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.mean[i])) << (i + 1 < s.x.size() ? " " : "");
    }
    o << "\"/>\n";
    const double ly = top + 16 + 20.0 * k;
    o << "<line x1=\"" << detail::fmt(left + pw + 12) << "\" y1=\"" << detail::fmt(ly) << "\" x2=\""
      << detail::fmt(left + pw + 36) << "\" y2=\"" << detail::fmt(ly) << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << detail::fmt(left + pw + 42) << "\" y=\"" << detail::fmt(ly + 4) << "\">"
      << detail::escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace lindground::cli
