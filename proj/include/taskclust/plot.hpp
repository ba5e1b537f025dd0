// Copyright 2026 The taskclust Authors
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


#ifndef TASKCLUST_PLOT_HPP_
#define TASKCLUST_PLOT_HPP_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

// Static SVG charts. Every file carries the run fingerprint both as a
// comment and as visible footer text.
namespace taskclust::plot {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Optional symmetric error band.
  std::vector<double> err;
};

void WriteLineChart(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series,
                    const std::string& fingerprint);

struct TracePath {
  std::vector<Eigen::Vector2d> points;
  // Colour index of each segment (points.size() - 1 entries).
  std::vector<int> segment_colors;
  std::optional<Eigen::Vector2d> goal;
  bool dashed = false;
};

void WriteTraceChart(const std::string& path, const std::string& title,
                     const std::vector<TracePath>& traces, const std::vector<std::string>& legend,
                     const std::string& fingerprint);

std::string PaletteColor(int index);

// Reads metrics.jsonl and eval_report.json from a finished run directory and
// writes learning_curve.svg, nmi_curve.svg and traces.svg next to them.
// Returns the written paths.
std::vector<std::string> WriteRunPlots(const std::string& run_dir);

}  // namespace taskclust::plot

#endif  // TASKCLUST_PLOT_HPP_
