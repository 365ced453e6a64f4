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

#ifndef INERTIA_SVG_PLOT_H_
#define INERTIA_SVG_PLOT_H_

#include <string>
#include <vector>

namespace inertia {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 960;
  int height = 420;
};

// Self-contained SVG line chart with axes, ticks and a legend. Output is a
// pure function of the inputs (fixed number formatting).
std::string RenderLinePlot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace inertia

#endif  // INERTIA_SVG_PLOT_H_
