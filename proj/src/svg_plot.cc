// Copyright 2026 The Inertia Authors
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

#include "inertia/svg_plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "inertia/errors.h"

namespace inertia {
namespace {

std::string Fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick step covering `span` with roughly `target` intervals.
double NiceStep(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string RenderLinePlot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw DataError("plot series " + s.label + ": x/y size mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x1 >= x0)) { x0 = 0.0; x1 = 1.0; y0 = 0.0; y1 = 1.0; }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
  const double pad = 0.08 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 70, right = 170, top = 40, bottom = 55;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << Fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << Escape(spec.title) << "</text>\n";

  const double xs = NiceStep(x1 - x0, 8), ys = NiceStep(y1 - y0, 6);
  for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-12; t += xs) {
    svg << "<line x1=\"" << Fmt(px(t)) << "\" y1=\"" << Fmt(top) << "\" x2=\"" << Fmt(px(t))
        << "\" y2=\"" << Fmt(top + ph) << "\" stroke=\"#e5e5e5\"/>\n";
    svg << "<text x=\"" << Fmt(px(t)) << "\" y=\"" << Fmt(top + ph + 16)
        << "\" text-anchor=\"middle\">" << Fmt(t, xs < 1 ? 2 : 0) << "</text>\n";
  }
  for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-12; t += ys) {
    svg << "<line x1=\"" << Fmt(left) << "\" y1=\"" << Fmt(py(t)) << "\" x2=\"" << Fmt(left + pw)
        << "\" y2=\"" << Fmt(py(t)) << "\" stroke=\"#e5e5e5\"/>\n";
    svg << "<text x=\"" << Fmt(left - 6) << "\" y=\"" << Fmt(py(t) + 4)
        << "\" text-anchor=\"end\">" << Fmt(t, ys < 0.1 ? 3 : 2) << "</text>\n";
  }
  svg << "<rect x=\"" << Fmt(left) << "\" y=\"" << Fmt(top) << "\" width=\"" << Fmt(pw)
      << "\" height=\"" << Fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << Fmt(left + pw / 2) << "\" y=\"" << Fmt(spec.height - 12.0)
      << "\" text-anchor=\"middle\">" << Escape(spec.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << Fmt(top + ph / 2) << ") rotate(-90)\" "
      << "text-anchor=\"middle\">" << Escape(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      svg << Fmt(px(s.x[i])) << ',' << Fmt(py(s.y[i])) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << Fmt(left + pw + 12) << "\" y1=\"" << Fmt(ly) << "\" x2=\""
        << Fmt(left + pw + 36) << "\" y2=\"" << Fmt(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    svg << "<text x=\"" << Fmt(left + pw + 42) << "\" y=\"" << Fmt(ly + 4) << "\">"
        << Escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace inertia
