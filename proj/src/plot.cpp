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


#include "taskclust/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <filesystem>

#include "taskclust/checkpoint.hpp"
#include "taskclust/evaluation.hpp"
#include "taskclust/metrics.hpp"

namespace taskclust::plot {
namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 70;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 60;

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

std::string Fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// Tick values covering [lo, hi] at a 1-2-5 step.
std::vector<double> Ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void Pad(double& lo, double& hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

void Open(std::ostream& out, const std::string& title, const std::string& fingerprint) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<!-- fingerprint: " << Escape(fingerprint) << " -->\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << Escape(title) << "</text>\n";
}

void Close(std::ostream& out, const std::string& fingerprint) {
  out << "<text x=\"" << kWidth - 8 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"end\" font-size=\"9\" fill=\"#888\">config " << Escape(fingerprint)
      << "</text>\n</svg>\n";
}

void Axes(std::ostream& out, const Frame& f, const std::string& x_label,
          const std::string& y_label) {
  for (double t : Ticks(f.x0, f.x1)) {
    out << "<line x1=\"" << f.px(t) << "\" y1=\"" << kTop << "\" x2=\"" << f.px(t) << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"#eee\"/>\n"
        << "<text x=\"" << f.px(t) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\">" << Fmt(t) << "</text>\n";
  }
  for (double t : Ticks(f.y0, f.y1)) {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << f.py(t) << "\" x2=\"" << kWidth - kRight
        << "\" y2=\"" << f.py(t) << "\" stroke=\"#eee\"/>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.py(t) + 4 << "\" text-anchor=\"end\">"
        << Fmt(t) << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
      << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"#444\"/>\n"
      << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 22
      << "\" text-anchor=\"middle\">" << Escape(x_label) << "</text>\n"
      << "<text transform=\"translate(18," << (kTop + kHeight - kBottom) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(y_label) << "</text>\n";
}

void Legend(std::ostream& out, const std::vector<std::string>& labels) {
  double y = kTop + 10;
  for (std::size_t i = 0; i < labels.size(); ++i, y += 18) {
    out << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << PaletteColor(static_cast<int>(i)) << "\"/>\n"
        << "<text x=\"" << kWidth - kRight + 30 << "\" y=\"" << y + 1 << "\">" << Escape(labels[i])
        << "</text>\n";
  }
}

std::ofstream OpenFile(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot " + path);
  return out;
}

}  // namespace

std::string PaletteColor(int index) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const int n = static_cast<int>(std::size(kPalette));
  return kPalette[((index % n) + n) % n];
}

void WriteLineChart(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series,
                    const std::string& fingerprint) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i] - e);
      y1 = std::max(y1, s.y[i] + e);
    }
  }
  Pad(x0, x1);
  Pad(y0, y1);
  const Frame f{x0, x1, y0, y1};

  std::ofstream out = OpenFile(path);
  Open(out, title, fingerprint);
  Axes(out, f, x_label, y_label);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    labels.push_back(s.label);
    const std::string color = PaletteColor(static_cast<int>(k));
    if (!s.err.empty()) {
      std::ostringstream band;
      std::vector<std::pair<double, double>> lower;
      for (std::size_t i = 0; i < s.x.size() && i < s.err.size(); ++i) {
        if (!std::isfinite(s.y[i])) continue;
        band << (band.tellp() ? " " : "") << f.px(s.x[i]) << "," << f.py(s.y[i] + s.err[i]);
        lower.emplace_back(f.px(s.x[i]), f.py(s.y[i] - s.err[i]));
      }
      for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
        band << " " << it->first << "," << it->second;
      }
      out << "<polygon points=\"" << band.str() << "\" fill=\"" << color
          << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (std::isfinite(s.y[i])) out << f.px(s.x[i]) << "," << f.py(s.y[i]) << " ";
    }
    out << "\"/>\n";
  }
  Legend(out, labels);
  Close(out, fingerprint);
}

void WriteTraceChart(const std::string& path, const std::string& title,
                     const std::vector<TracePath>& traces, const std::vector<std::string>& legend,
                     const std::string& fingerprint) {
  double lim = 1.0;
  for (const auto& t : traces) {
    for (const auto& p : t.points) lim = std::max(lim, p.cwiseAbs().maxCoeff());
    if (t.goal) lim = std::max(lim, t.goal->cwiseAbs().maxCoeff());
  }
  lim *= 1.1;
  // Square plotting area.
  const double side = std::min(kWidth - kLeft - kRight, kHeight - kTop - kBottom);
  auto px = [&](double x) { return kLeft + (x + lim) / (2 * lim) * side; };
  auto py = [&](double y) { return kTop + side - (y + lim) / (2 * lim) * side; };

  std::ofstream out = OpenFile(path);
  Open(out, title, fingerprint);
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << side << "\" height=\""
      << side << "\" fill=\"none\" stroke=\"#444\"/>\n"
      << "<line x1=\"" << px(-lim) << "\" y1=\"" << py(0) << "\" x2=\"" << px(lim) << "\" y2=\""
      << py(0) << "\" stroke=\"#ddd\"/>\n"
      << "<line x1=\"" << px(0) << "\" y1=\"" << py(-lim) << "\" x2=\"" << px(0) << "\" y2=\""
      << py(lim) << "\" stroke=\"#ddd\"/>\n";
  for (const auto& t : traces) {
    for (std::size_t i = 0; i + 1 < t.points.size(); ++i) {
      const int c = i < t.segment_colors.size() ? t.segment_colors[i] : 0;
      out << "<line x1=\"" << px(t.points[i].x()) << "\" y1=\"" << py(t.points[i].y())
          << "\" x2=\"" << px(t.points[i + 1].x()) << "\" y2=\"" << py(t.points[i + 1].y())
          << "\" stroke=\"" << PaletteColor(c) << "\" stroke-width=\"1.5\""
          << (t.dashed ? " stroke-dasharray=\"4,3\"" : "") << "/>\n";
    }
    if (t.goal) {
      out << "<circle cx=\"" << px(t.goal->x()) << "\" cy=\"" << py(t.goal->y())
          << "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
    }
  }
  Legend(out, legend);
  Close(out, fingerprint);
}

std::vector<std::string> WriteRunPlots(const std::string& run_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(run_dir);
  std::vector<std::string> written;

  const MetricsReadResult metrics = ReadMetrics((dir / "metrics.jsonl").string());
  if (metrics.records.empty()) throw std::runtime_error("no metric records in " + run_dir);
  const std::string fingerprint = metrics.records.back().fingerprint;
  std::vector<Series> returns;
  const std::size_t episodes = metrics.records.back().test_returns.size();
  for (std::size_t e = 0; e < episodes; ++e) {
    Series s;
    s.label = "test episode " + std::to_string(e + 1);
    for (const auto& r : metrics.records) {
      if (e >= r.test_returns.size()) continue;
      s.x.push_back(static_cast<double>(r.frames));
      s.y.push_back(r.test_returns[e]);
    }
    returns.push_back(std::move(s));
  }
  const std::string learning = (dir / "learning_curve.svg").string();
  WriteLineChart(learning, "Held-out return per episode", "environment frames", "mean return",
                 returns, fingerprint);
  written.push_back(learning);

  const EvalReport report = EvalReportFromJson(ReadJsonFile((dir / "eval_report.json").string()));
  Series nmi;
  nmi.label = "NMI";
  for (std::size_t t = 0; t < report.nmi_curve.size(); ++t) {
    nmi.x.push_back(static_cast<double>(t + 1));
    nmi.y.push_back(report.nmi_curve[t]);
  }
  Series progress;
  progress.label = "end-of-episode NMI";
  for (const auto& r : metrics.records) {
    progress.x.push_back(static_cast<double>(r.iteration));
    progress.y.push_back(r.nmi);
  }
  const std::string nmi_path = (dir / "nmi_curve.svg").string();
  WriteLineChart(nmi_path, "Cluster inference during exploration", "exploration step", "NMI",
                 {nmi}, report.fingerprint);
  written.push_back(nmi_path);
  const std::string nmi_training = (dir / "nmi_training.svg").string();
  WriteLineChart(nmi_training, "NMI over training", "iteration", "NMI", {progress}, fingerprint);
  written.push_back(nmi_training);

  std::vector<TracePath> paths;
  int max_cluster = 0;
  for (const auto& trace : report.traces) {
    for (std::size_t e = 0; e < trace.episodes.size(); ++e) {
      TracePath p;
      p.goal = trace.goal;
      p.dashed = e > 0;
      for (const auto& s : trace.episodes[e]) p.points.push_back(s.position);
      for (std::size_t i = 1; i < trace.episodes[e].size(); ++i) {
        p.segment_colors.push_back(trace.episodes[e][i].inferred_cluster);
        max_cluster = std::max(max_cluster, trace.episodes[e][i].inferred_cluster);
      }
      paths.push_back(std::move(p));
    }
  }
  std::vector<std::string> legend;
  for (int c = 0; c <= max_cluster; ++c) legend.push_back("inferred cluster " + std::to_string(c));
  const std::string traces = (dir / "traces.svg").string();
  WriteTraceChart(traces, "Test trajectories (solid: exploration, dashed: exploitation)", paths,
                  legend, report.fingerprint);
  written.push_back(traces);
  return written;
}

}  // namespace taskclust::plot
