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

#include "taskclust/task_distribution.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "taskclust/random.hpp"

namespace taskclust {

std::string ToString(TaskFamily family) {
  switch (family) {
    case TaskFamily::kGoalClustered: return "goal-clustered";
    case TaskFamily::kDynamicsClustered: return "dynamics-clustered";
    case TaskFamily::kGoalSparse: return "goal-sparse";
    case TaskFamily::kGoalUniform: return "goal-uniform";
  }
  return "unknown";
}

TaskFamily TaskFamilyFromString(const std::string& name) {
  if (name == "goal-clustered") return TaskFamily::kGoalClustered;
  if (name == "dynamics-clustered") return TaskFamily::kDynamicsClustered;
  if (name == "goal-sparse") return TaskFamily::kGoalSparse;
  if (name == "goal-uniform") return TaskFamily::kGoalUniform;
  throw std::invalid_argument("unknown task family '" + name + "'");
}

int DynamicsParamSetSize(DynamicsParamSet set) {
  return set == DynamicsParamSet::kDrift ? 2 : 1;
}

std::vector<std::string> MixtureConfig::Validate() const {
  std::vector<std::string> errors;
  if (num_clusters < 1) errors.push_back("mixture.num_clusters: must be >= 1");
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != num_clusters) {
      errors.push_back("mixture.weights: length must equal num_clusters");
    }
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) errors.push_back("mixture.weights: entries must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) errors.push_back("mixture.weights: must sum to 1");
  }
  if (!(radius > 0.0)) errors.push_back("mixture.radius: must be positive");
  switch (family) {
    case TaskFamily::kGoalClustered:
    case TaskFamily::kGoalSparse:
      if (static_cast<int>(angle_means.size()) != num_clusters) {
        errors.push_back("mixture.angle_means: length must equal num_clusters");
      }
      if (static_cast<int>(angle_stds.size()) != num_clusters) {
        errors.push_back("mixture.angle_stds: length must equal num_clusters");
      }
      for (double s : angle_stds) {
        if (!(s > 0.0)) errors.push_back("mixture.angle_stds: must be positive");
      }
      if (family == TaskFamily::kGoalSparse && !(sparse_threshold > 0.0)) {
        errors.push_back("mixture.sparse_threshold: must be positive");
      }
      break;
    case TaskFamily::kGoalUniform:
      if (num_clusters != 1) errors.push_back("mixture.num_clusters: goal-uniform requires 1");
      break;
    case TaskFamily::kDynamicsClustered:
      if (static_cast<int>(param_sets.size()) != num_clusters) {
        errors.push_back("mixture.param_sets: length must equal num_clusters");
      }
      for (int s : param_sets) {
        if (s < 0 || s >= kNumDynamicsParamSets) {
          errors.push_back("mixture.param_sets: entries must be in [0, 3]");
        }
      }
      if (!(multiplier_std > 0.0)) errors.push_back("mixture.multiplier_std: must be positive");
      break;
  }
  return errors;
}

std::vector<double> MixtureConfig::EffectiveWeights() const {
  if (!weights.empty()) return weights;
  return std::vector<double>(static_cast<std::size_t>(std::max(num_clusters, 1)),
                             1.0 / std::max(num_clusters, 1));
}

std::vector<std::string> ValidateTask(const TaskSpec& task, const MixtureConfig& cfg) {
  std::vector<std::string> errors;
  if (task.cluster_id < 0 || task.cluster_id >= cfg.num_clusters) {
    errors.push_back("cluster_id out of range");
  }
  const bool goal_family = IsGoalFamily(cfg.family);
  if (goal_family && (!task.goal || task.dynamics)) {
    errors.push_back("goal family task must carry a goal and no dynamics");
  }
  if (!goal_family && (task.goal || !task.dynamics)) {
    errors.push_back("dynamics family task must carry dynamics and no goal");
  }
  if (task.dynamics &&
      static_cast<int>(task.dynamics->multipliers.size()) !=
          DynamicsParamSetSize(task.dynamics->param_set)) {
    errors.push_back("dynamics multiplier count does not match parameter set");
  }
  return errors;
}

Vec2 GoalFromAngle(double radius, double theta) {
  return {radius * std::cos(theta * M_PI), radius * std::sin(theta * M_PI)};
}

TaskSpec MakeGoalTask(const MixtureConfig& cfg, int cluster_id, double theta, int task_id) {
  TaskSpec task;
  task.task_id = task_id;
  task.cluster_id = cluster_id;
  task.angle = theta;
  task.goal = GoalFromAngle(cfg.radius, theta);
  if (cfg.family == TaskFamily::kGoalSparse) task.sparse_threshold = cfg.sparse_threshold;
  return task;
}

TaskSpec SampleTask(const MixtureConfig& cfg, std::uint64_t seed, int task_id) {
  if (auto errors = cfg.Validate(); !errors.empty()) {
    throw std::invalid_argument("invalid mixture config: " + errors.front());
  }
  Rng rng(DeriveSeed(seed, {0x7a5c}));
  const auto w = cfg.EffectiveWeights();
  std::discrete_distribution<int> pick(w.begin(), w.end());
  const int cluster = pick(rng);

  switch (cfg.family) {
    case TaskFamily::kGoalClustered:
    case TaskFamily::kGoalSparse: {
      std::normal_distribution<double> angle(cfg.angle_means[cluster], cfg.angle_stds[cluster]);
      return MakeGoalTask(cfg, cluster, angle(rng), task_id);
    }
    case TaskFamily::kGoalUniform: {
      std::uniform_real_distribution<double> angle(0.0, 2.0);
      return MakeGoalTask(cfg, cluster, angle(rng), task_id);
    }
    case TaskFamily::kDynamicsClustered: {
      TaskSpec task;
      task.task_id = task_id;
      task.cluster_id = cluster;
      DynamicsSpec dyn;
      dyn.param_set = static_cast<DynamicsParamSet>(cfg.param_sets[cluster]);
      std::normal_distribution<double> mult(cfg.multiplier_mean, cfg.multiplier_std);
      for (int i = 0; i < DynamicsParamSetSize(dyn.param_set); ++i) {
        dyn.multipliers.push_back(mult(rng));
      }
      task.dynamics = std::move(dyn);
      task.noise_seed = Mix64(rng());
      return task;
    }
  }
  throw std::logic_error("unreachable task family");
}

MetaSplit MakeMetaSplit(const MixtureConfig& cfg, int n_train, int n_test, std::uint64_t seed) {
  if (n_train <= 0 || n_test <= 0) {
    throw std::invalid_argument("MakeMetaSplit: n_train and n_test must be positive");
  }
  MetaSplit split;
  split.train.reserve(static_cast<std::size_t>(n_train));
  split.test.reserve(static_cast<std::size_t>(n_test));
  for (int i = 0; i < n_train + n_test; ++i) {
    TaskSpec task = SampleTask(cfg, DeriveSeed(seed, {0x5917, static_cast<std::uint64_t>(i)}), i);
    (i < n_train ? split.train : split.test).push_back(std::move(task));
  }
  return split;
}

}  // namespace taskclust
