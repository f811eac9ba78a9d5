// Copyright 2026 The cfisac Authors
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

#include "cfisac/plot_svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cfisac {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

// Round step for about n ticks over [lo, hi].
double nice_step(double lo, double hi, int n) {
  const double raw = (hi - lo) / std::max(1, n);
  if (!(raw > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string svg_panel(const PlotSpec& spec, const std::vector<PlotSeries>& series,
                      double x0, double y0, double width, double height) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      if (!s.lo.empty()) ymin = std::min(ymin, s.lo[i]);
      if (!s.hi.empty()) ymax = std::max(ymax, s.hi[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  const double left = x0 + 60.0;
  const double right = x0 + width - 130.0;
  const double top = y0 + 30.0;
  const double bottom = y0 + height - 45.0;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - top); };

  std::ostringstream os;
  os << "<g>\n";
  os << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(y0 + 18)
     << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
     << num(right - left) << "\" height=\"" << num(bottom - top)
     << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const double xs = nice_step(xmin, xmax, 5);
  for (double v = std::ceil(xmin / xs) * xs; v <= xmax + 1e-9 * xs; v += xs) {
    os << "<line x1=\"" << num(px(v)) << "\" y1=\"" << num(bottom) << "\" x2=\""
       << num(px(v)) << "\" y2=\"" << num(bottom + 4) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << num(px(v)) << "\" y=\"" << num(bottom + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(v) << "</text>\n";
  }
  const double ys = nice_step(ymin, ymax, 5);
  for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9 * ys; v += ys) {
    os << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(py(v)) << "\" x2=\""
       << num(left) << "\" y2=\"" << num(py(v)) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(v) + 3)
       << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(v) << "</text>\n";
  }
  os << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(bottom + 34)
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(" << num(x0 + 16) << "," << num((top + bottom) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(spec.y_label)
     << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!s.lo.empty() && !s.hi.empty() && !s.x.empty()) {
      os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << num(px(s.x[i])) << "," << num(py(s.hi[i])) << " ";
      for (std::size_t i = s.x.size(); i-- > 0;)
        os << num(px(s.x[i])) << "," << num(py(s.lo[i])) << " ";
      os << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (spec.step && i > 0) os << num(px(s.x[i])) << "," << num(py(s.y[i - 1])) << " ";
      os << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
    }
    os << "\"/>\n";
    const double ly = top + 14.0 + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << num(right + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
       << num(right + 28) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(right + 32) << "\" y=\"" << num(ly + 4)
       << "\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  os << "</g>\n";
  return os.str();
}

std::string svg_document(double width, double height, const std::string& body) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
     << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << " "
     << num(height) << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << body << "</svg>\n";
  return os.str();
}

}  // namespace cfisac
