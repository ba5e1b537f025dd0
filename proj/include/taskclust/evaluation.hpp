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


#ifndef TASKCLUST_EVALUATION_HPP_
#define TASKCLUST_EVALUATION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "taskclust/config.hpp"
#include "taskclust/rollout.hpp"

namespace taskclust {

// Normalised mutual information I(X; Y) / sqrt(H(X) H(Y)) of the empirical
// joint distribution of (true, inferred) labels; 0 when either entropy is 0.
double Nmi(const std::vector<std::pair<int, int>>& assignments);
double Nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

struct ClusterAssignment {
  int task_id = 0;
  int true_cluster = 0;
  // argmax q(c | tau) at the end of the exploration episode.
  int inferred_cluster = 0;
};

struct TraceStep {
  Vec2 position;
  int inferred_cluster = 0;
};

struct TaskTrace {
  int task_id = 0;
  int true_cluster = 0;
  std::optional<Vec2> goal;
  // One entry per episode; H + 1 positions starting at the reset state.
  std::vector<std::vector<TraceStep>> episodes;
};

struct EvalReport {
  std::string fingerprint;
  long iteration = 0;
  // tasks x episodes.
  std::vector<std::vector<double>> returns;
  std::vector<double> mean_returns;
  std::vector<double> stderr_returns;
  // NMI after each exploration step t = 1..H.
  std::vector<double> nmi_curve;
  double nmi_final = 0.0;
  double nmi_mean = 0.0;
  std::vector<ClusterAssignment> assignments;
  std::vector<TaskTrace> traces;

  int num_tasks() const { return static_cast<int>(returns.size()); }
};

nlohmann::json ToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const nlohmann::json& j);

// Aggregates test-mode trial results into a report.
EvalReport MakeReport(const std::vector<TrialResult>& trials);

// Runs the trial protocol in test mode on every task. The noise of task i
// is drawn from DeriveSeed(seed, {task_id}), so reports do not depend on
// task order or worker count.
EvalReport Evaluate(const Agent& agent, const std::vector<TaskSpec>& tasks,
                    const PointRobotEnv& env, TrialOptions options, std::uint64_t seed);

// Loads a checkpoint read-only and evaluates it on the test split of cfg.
EvalReport EvaluateCheckpoint(const std::string& checkpoint_path, const RunConfig& cfg);

// Ablation variants, in table order.
const std::vector<std::string>& AblationVariants();
// Returns cfg modified for `variant`; throws std::invalid_argument for an
// unknown name.
RunConfig ApplyVariant(RunConfig cfg, const std::string& variant);

struct StudyCell {
  std::string label;
  RunConfig config;
  std::vector<EvalReport> reports;  // one per seed
  std::string error;                // non-empty when a sub-run failed

  // Per-episode mean over seeds of the per-seed mean test return, and the
  // standard error across seeds.
  std::vector<double> MeanReturns() const;
  std::vector<double> StderrReturns() const;
  double MeanFinalNmi() const;
};

struct StudyTable {
  std::string title;
  std::vector<StudyCell> cells;

  std::string ToMarkdown() const;
  nlohmann::json ToJson() const;
};

using ProgressFn = std::function<void(const std::string&)>;

// Trains and evaluates every ablation variant for each seed base.seed + k,
// k < num_seeds. Sub-run directories live under base.output_dir.
StudyTable RunAblations(const RunConfig& base, int num_seeds, const ProgressFn& progress = {});

// Same for the model cluster counts in `counts`.
StudyTable SweepClusters(const RunConfig& base, const std::vector<int>& counts, int num_seeds,
                         const ProgressFn& progress = {});

}  // namespace taskclust

#endif  // TASKCLUST_EVALUATION_HPP_
