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


#include "taskclust/evaluation.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "taskclust/checkpoint.hpp"
#include "taskclust/trainer.hpp"

namespace taskclust {

using nlohmann::json;

double Nmi(const std::vector<std::pair<int, int>>& assignments) {
  const double n = static_cast<double>(assignments.size());
  if (assignments.empty()) return 0.0;
  std::map<int, double> count_x;
  std::map<int, double> count_y;
  std::map<std::pair<int, int>, double> joint;
  for (const auto& xy : assignments) {
    count_x[xy.first] += 1.0;
    count_y[xy.second] += 1.0;
    joint[xy] += 1.0;
  }
  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [k, c] : counts) h -= c / n * std::log(c / n);
    return h;
  };
  const double hx = entropy(count_x);
  const double hy = entropy(count_y);
  if (hx <= 0.0 || hy <= 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [xy, c] : joint) {
    mi += c / n * std::log(c * n / (count_x[xy.first] * count_y[xy.second]));
  }
  return std::clamp(mi / std::sqrt(hx * hy), 0.0, 1.0);
}

double Nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size()) throw std::invalid_argument("Nmi: length mismatch");
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < labels_a.size(); ++i) pairs.emplace_back(labels_a[i], labels_b[i]);
  return Nmi(pairs);
}

EvalReport MakeReport(const std::vector<TrialResult>& trials) {
  EvalReport r;
  if (trials.empty()) return r;
  const std::size_t episodes = trials.front().episodes.size();
  const std::size_t horizon = trials.front().episodes.front().transitions.size();
  std::vector<std::vector<int>> inferred;  // per task, per step
  std::vector<int> truth;
  for (const auto& trial : trials) {
    r.returns.push_back(trial.Returns());
    for (double v : r.returns.back()) {
      if (!std::isfinite(v)) throw std::runtime_error("non-finite return in evaluation");
    }
    const EpisodeRecord& first = trial.episodes.front();
    inferred.push_back(first.InferredClusters());
    truth.push_back(trial.task.cluster_id);
    r.assignments.push_back({trial.task.task_id, trial.task.cluster_id, inferred.back().back()});

    TaskTrace trace;
    trace.task_id = trial.task.task_id;
    trace.true_cluster = trial.task.cluster_id;
    trace.goal = trial.task.goal;
    for (const auto& ep : trial.episodes) {
      std::vector<TraceStep> steps;
      for (std::size_t t = 0; t <= ep.transitions.size(); ++t) {
        TraceStep s;
        s.position = t == 0 ? ep.transitions.front().state : ep.transitions[t - 1].next_state;
        Eigen::Index c = 0;
        ep.cluster_probs.col(static_cast<Eigen::Index>(t)).maxCoeff(&c);
        s.inferred_cluster = static_cast<int>(c);
        steps.push_back(s);
      }
      trace.episodes.push_back(std::move(steps));
    }
    r.traces.push_back(std::move(trace));
  }

  const double n = static_cast<double>(trials.size());
  for (std::size_t e = 0; e < episodes; ++e) {
    double sum = 0.0;
    for (const auto& row : r.returns) sum += row[e];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& row : r.returns) ss += (row[e] - mean) * (row[e] - mean);
    r.mean_returns.push_back(mean);
    r.stderr_returns.push_back(n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0);
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<int> at_t;
    for (const auto& seq : inferred) at_t.push_back(seq[t]);
    r.nmi_curve.push_back(Nmi(truth, at_t));
  }
  r.nmi_final = r.nmi_curve.back();
  r.nmi_mean = std::accumulate(r.nmi_curve.begin(), r.nmi_curve.end(), 0.0) / r.nmi_curve.size();
  return r;
}

EvalReport Evaluate(const Agent& agent, const std::vector<TaskSpec>& tasks,
                    const PointRobotEnv& env, TrialOptions options, std::uint64_t seed) {
  if (tasks.size() < 2) throw std::invalid_argument("Evaluate: need at least two tasks");
  options.mode = RolloutMode::kTest;
  std::vector<std::uint64_t> seeds;
  for (const auto& t : tasks) seeds.push_back(DeriveSeed(seed, {static_cast<std::uint64_t>(t.task_id)}));
  return MakeReport(RunTrials(tasks, seeds, agent, env, options));
}

EvalReport EvaluateCheckpoint(const std::string& checkpoint_path, const RunConfig& cfg) {
  Trainer trainer(cfg);
  trainer.LoadCheckpoint(checkpoint_path);
  return trainer.EvaluateTest();
}

json ToJson(const EvalReport& r) {
  json j;
  j["fingerprint"] = r.fingerprint;
  j["iteration"] = r.iteration;
  j["returns"] = r.returns;
  j["mean_returns"] = r.mean_returns;
  j["stderr_returns"] = r.stderr_returns;
  j["nmi_curve"] = r.nmi_curve;
  j["nmi_final"] = r.nmi_final;
  j["nmi_mean"] = r.nmi_mean;
  json assignments = json::array();
  for (const auto& a : r.assignments) {
    assignments.push_back({{"task_id", a.task_id},
                           {"true_cluster", a.true_cluster},
                           {"inferred_cluster", a.inferred_cluster}});
  }
  j["assignments"] = assignments;
  json traces = json::array();
  for (const auto& t : r.traces) {
    json episodes = json::array();
    for (const auto& ep : t.episodes) {
      json steps = json::array();
      for (const auto& s : ep) steps.push_back({s.position.x(), s.position.y(), s.inferred_cluster});
      episodes.push_back(steps);
    }
    json trace = {{"task_id", t.task_id}, {"true_cluster", t.true_cluster}, {"episodes", episodes}};
    if (t.goal) trace["goal"] = {t.goal->x(), t.goal->y()};
    traces.push_back(trace);
  }
  j["traces"] = traces;
  return j;
}

EvalReport EvalReportFromJson(const json& j) {
  EvalReport r;
  r.fingerprint = j.at("fingerprint").get<std::string>();
  r.iteration = j.at("iteration").get<long>();
  r.returns = j.at("returns").get<std::vector<std::vector<double>>>();
  r.mean_returns = j.at("mean_returns").get<std::vector<double>>();
  r.stderr_returns = j.at("stderr_returns").get<std::vector<double>>();
  r.nmi_curve = j.at("nmi_curve").get<std::vector<double>>();
  r.nmi_final = j.at("nmi_final").get<double>();
  r.nmi_mean = j.at("nmi_mean").get<double>();
  for (const auto& a : j.at("assignments")) {
    r.assignments.push_back({a.at("task_id").get<int>(), a.at("true_cluster").get<int>(),
                             a.at("inferred_cluster").get<int>()});
  }
  for (const auto& t : j.at("traces")) {
    TaskTrace trace;
    trace.task_id = t.at("task_id").get<int>();
    trace.true_cluster = t.at("true_cluster").get<int>();
    if (t.contains("goal")) trace.goal = Vec2(t["goal"][0].get<double>(), t["goal"][1].get<double>());
    for (const auto& ep : t.at("episodes")) {
      std::vector<TraceStep> steps;
      for (const auto& s : ep) {
        steps.push_back({Vec2(s[0].get<double>(), s[1].get<double>()), s[2].get<int>()});
      }
      trace.episodes.push_back(std::move(steps));
    }
    r.traces.push_back(std::move(trace));
  }
  return r;
}

const std::vector<std::string>& AblationVariants() {
  static const std::vector<std::string> kVariants{"varibad-g", "no-exploration", "no-sgru",
                                                  "no-cr",     "rc-off",         "full"};
  return kVariants;
}

RunConfig ApplyVariant(RunConfig cfg, const std::string& variant) {
  if (variant == "full") {
  } else if (variant == "no-exploration") {
    cfg.train.exploration_enabled = false;
  } else if (variant == "no-sgru") {
    cfg.cbvi.stacked = false;
  } else if (variant == "no-cr") {
    cfg.cbvi.lambda_i = 0.0;
    cfg.cbvi.lambda_p = 0.0;
  } else if (variant == "rc-off") {
    cfg.intrinsic.consistency_enabled = false;
  } else if (variant == "varibad-g") {
    cfg.cbvi.num_clusters = 1;
    cfg.cbvi.stacked = false;
    cfg.train.exploration_enabled = false;
    cfg.intrinsic.entropy_enabled = false;
    cfg.intrinsic.consistency_enabled = false;
  } else {
    throw std::invalid_argument("unknown ablation variant '" + variant + "'");
  }
  cfg.variant = variant;
  return cfg;
}

std::vector<double> StudyCell::MeanReturns() const {
  std::vector<double> out;
  if (reports.empty()) return out;
  for (std::size_t e = 0; e < reports.front().mean_returns.size(); ++e) {
    double s = 0.0;
    for (const auto& r : reports) s += r.mean_returns[e];
    out.push_back(s / reports.size());
  }
  return out;
}

std::vector<double> StudyCell::StderrReturns() const {
  std::vector<double> out;
  const std::vector<double> mean = MeanReturns();
  const double n = static_cast<double>(reports.size());
  for (std::size_t e = 0; e < mean.size(); ++e) {
    double ss = 0.0;
    for (const auto& r : reports) ss += (r.mean_returns[e] - mean[e]) * (r.mean_returns[e] - mean[e]);
    out.push_back(n > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0);
  }
  return out;
}

double StudyCell::MeanFinalNmi() const {
  if (reports.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : reports) s += r.nmi_final;
  return s / reports.size();
}

std::string StudyTable::ToMarkdown() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  std::size_t episodes = 0;
  for (const auto& c : cells) episodes = std::max(episodes, c.MeanReturns().size());
  out << "## " << title << "\n\n| run | seeds |";
  for (std::size_t e = 0; e < episodes; ++e) out << " episode " << e + 1 << " |";
  out << " NMI (end of exploration) |\n|---|---|";
  for (std::size_t e = 0; e < episodes; ++e) out << "---|";
  out << "---|\n";
  for (const auto& c : cells) {
    out << "| " << c.label << " | " << c.reports.size() << " |";
    if (!c.error.empty()) {
      for (std::size_t e = 0; e < episodes; ++e) out << " failed |";
      out << " " << c.error << " |\n";
      continue;
    }
    const auto mean = c.MeanReturns();
    const auto se = c.StderrReturns();
    for (std::size_t e = 0; e < episodes; ++e) {
      if (e < mean.size()) {
        out << " " << mean[e] << " ± " << se[e] << " |";
      } else {
        out << " |";
      }
    }
    out.precision(3);
    out << " " << c.MeanFinalNmi() << " |\n";
    out.precision(2);
  }
  return out.str();
}

json StudyTable::ToJson() const {
  json cells_json = json::array();
  for (const auto& c : cells) {
    json reports = json::array();
    for (const auto& r : c.reports) {
      reports.push_back({{"fingerprint", r.fingerprint},
                         {"mean_returns", r.mean_returns},
                         {"stderr_returns", r.stderr_returns},
                         {"nmi_final", r.nmi_final},
                         {"nmi_mean", r.nmi_mean}});
    }
    cells_json.push_back({{"label", c.label},
                          {"variant", c.config.variant},
                          {"num_clusters", c.config.cbvi.num_clusters},
                          {"lambda_i", c.config.cbvi.lambda_i},
                          {"lambda_p", c.config.cbvi.lambda_p},
                          {"mean_returns", c.MeanReturns()},
                          {"stderr_returns", c.StderrReturns()},
                          {"nmi_final", c.MeanFinalNmi()},
                          {"error", c.error},
                          {"runs", reports}});
  }
  return {{"title", title}, {"cells", cells_json}};
}

namespace {

StudyCell RunCell(const std::string& label, const RunConfig& cfg, int num_seeds,
                  const ProgressFn& progress) {
  StudyCell cell;
  cell.label = label;
  cell.config = cfg;
  for (int k = 0; k < num_seeds; ++k) {
    RunConfig run = cfg;
    run.seed = cfg.seed + static_cast<std::uint64_t>(k);
    run.output_dir =
        (std::filesystem::path(cfg.output_dir) / label / ("seed_" + std::to_string(run.seed)))
            .string();
    if (progress) progress("training " + label + " seed " + std::to_string(run.seed));
    try {
      cell.reports.push_back(MetaTrain(run).final_report);
    } catch (const std::exception& e) {
      cell.error = e.what();
      if (progress) progress(label + " failed: " + cell.error);
      break;
    }
  }
  return cell;
}

}  // namespace

StudyTable RunAblations(const RunConfig& base, int num_seeds, const ProgressFn& progress) {
  StudyTable table;
  table.title = "Ablations";
  for (const auto& v : AblationVariants()) {
    table.cells.push_back(RunCell(v, ApplyVariant(base, v), num_seeds, progress));
  }
  return table;
}

StudyTable SweepClusters(const RunConfig& base, const std::vector<int>& counts, int num_seeds,
                         const ProgressFn& progress) {
  StudyTable table;
  table.title = "Cluster count sweep";
  for (int c : counts) {
    RunConfig cfg = base;
    cfg.cbvi.num_clusters = c;
    cfg.variant = base.variant + "-C" + std::to_string(c);
    table.cells.push_back(RunCell("C" + std::to_string(c), cfg, num_seeds, progress));
  }
  return table;
}

}  // namespace taskclust
