#pragma once

// Two-series overlay charts as plain SVG text. Output depends only on the
// input values, so identical data renders byte-identical files.

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "sentmic/date.hpp"
#include "sentmic/error.hpp"

namespace sentmic::svg {

struct Line {
  std::string label;
  std::string color;
  std::vector<double> values;  // plotted on [0, 1]
};

struct ChartSpec {
  std::string title;
  std::vector<Date> dates;
  std::vector<Line> lines;
  int width = 800;
  int height = 400;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Rescales to [0, 1]; a constant sequence sits at 0.5.
inline std::vector<double> unit_scale(const std::vector<double>& v) {
  if (v.empty()) return {};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(*hi > *lo ? (x - *lo) / (*hi - *lo) : 0.5);
  return out;
}

inline std::string render(const ChartSpec& spec) {
  if (spec.dates.size() < 2) throw Error(ErrorKind::InvalidArgument, "chart needs at least 2 points");
  for (const auto& l : spec.lines) {
    if (l.values.size() != spec.dates.size()) throw Error(ErrorKind::LengthMismatch, "line '" + l.label + "'");
  }
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;
  const std::size_t n = spec.dates.size();
  const auto px = [&](std::size_t i) { return left + pw * static_cast<double>(i) / static_cast<double>(n - 1); };
  const auto py = [&](double v) { return top + ph * (1.0 - std::clamp(v, 0.0, 1.0)); };
  using detail::num;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
       std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
       std::to_string(spec.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(spec.width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + detail::escape(spec.title) + "</text>\n";

  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
         num(py(v)) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(v) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(v) + "</text>\n";
  }
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
       num(top + ph) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + ph) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  const std::size_t ticks = std::min<std::size_t>(n, 5);
  for (std::size_t k = 0; k < ticks; ++k) {
    const std::size_t i = ticks == 1 ? 0 : k * (n - 1) / (ticks - 1);
    s += "<text x=\"" + num(px(i)) + "\" y=\"" + num(top + ph + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + format_iso_date(spec.dates[i]) +
         "</text>\n";
  }

  for (std::size_t li = 0; li < spec.lines.size(); ++li) {
    const auto& line = spec.lines[li];
    s += "<polyline fill=\"none\" stroke=\"" + detail::escape(line.color) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s.push_back(' ');
      s += num(px(i)) + "," + num(py(line.values[i]));
    }
    s += "\"/>\n";
    const double ly = top + ph + 36;
    const double lx = left + 160.0 * static_cast<double>(li);
    s += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly - 4) +
         "\" stroke=\"" + detail::escape(line.color) + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly) + "\" font-family=\"sans-serif\" font-size=\"12\">" +
         detail::escape(line.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace sentmic::svg
