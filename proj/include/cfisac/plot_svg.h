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

#pragma once

#include <string>
#include <vector>

namespace cfisac {

// One polyline; lo/hi (same length as x, or empty) draw a shaded band.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool step = false;  // staircase lines (empirical CDFs)
};

// Axes, ticks, legend and series of one chart placed at (x0, y0).
std::string svg_panel(const PlotSpec& spec, const std::vector<PlotSeries>& series,
                      double x0, double y0, double width, double height);

std::string svg_document(double width, double height, const std::string& body);

}  // namespace cfisac
