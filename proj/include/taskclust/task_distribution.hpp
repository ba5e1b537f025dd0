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

#ifndef TASKCLUST_TASK_DISTRIBUTION_HPP_
#define TASKCLUST_TASK_DISTRIBUTION_HPP_

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace taskclust {

using Vec2 = Eigen::Vector2d;

enum class TaskFamily { kGoalClustered, kDynamicsClustered, kGoalSparse, kGoalUniform };

std::string ToString(TaskFamily family);
TaskFamily TaskFamilyFromString(const std::string& name);
inline bool IsGoalFamily(TaskFamily f) { return f != TaskFamily::kDynamicsClustered; }

// Dynamics parameter sets acting on the point robot.
enum class DynamicsParamSet : int { kGain = 0, kRotation = 1, kDrift = 2, kNoise = 3 };
inline constexpr int kNumDynamicsParamSets = 4;
// Number of scalar parameters (and hence multipliers) in a set.
int DynamicsParamSetSize(DynamicsParamSet set);

// Mixture over task clusters, p(M) = sum_c w_c p_c(M).
struct MixtureConfig {
  int num_clusters = 4;
  // Empty means uniform.
  std::vector<double> weights;
  TaskFamily family = TaskFamily::kGoalClustered;

  // Goal families. Angles in units of pi radians.
  std::vector<double> angle_means{0.25, 0.75, 1.25, 1.75};
  std::vector<double> angle_stds{0.2, 0.2, 0.2, 0.2};
  double radius = 2.0;
  // Reward threshold for the sparse family (L1 distance).
  double sparse_threshold = 1.0;

  // Dynamics family: the parameter set manipulated by each cluster, and the
  // normal distribution of multipliers applied to it.
  std::vector<int> param_sets{0, 1, 2, 3};
  double multiplier_mean = 3.0;
  double multiplier_std = 1.5;

  // Empty result means valid. Messages name the offending field.
  std::vector<std::string> Validate() const;
  // Uniform weights filled in when `weights` is empty.
  std::vector<double> EffectiveWeights() const;
};

struct DynamicsSpec {
  DynamicsParamSet param_set = DynamicsParamSet::kGain;
  std::vector<double> multipliers;
};

struct TaskSpec {
  int task_id = 0;
  int cluster_id = 0;
  std::optional<Vec2> goal;
  std::optional<DynamicsSpec> dynamics;
  std::optional<double> sparse_threshold;
  // Goal angle in pi units (goal families only), kept for diagnostics.
  double angle = 0.0;
  // Seed of the deterministic control-noise stream (dynamics family).
  std::uint64_t noise_seed = 0;
};

// Checks the one-of goal/dynamics invariant against the family.
std::vector<std::string> ValidateTask(const TaskSpec& task, const MixtureConfig& cfg);

// Goal on the circle of radius r at angle theta (pi units).
Vec2 GoalFromAngle(double radius, double theta);

// Builds the task for a given cluster and angle draw; the sampling-free part
// of SampleTask, exposed so that specific angles can be realised.
TaskSpec MakeGoalTask(const MixtureConfig& cfg, int cluster_id, double theta, int task_id = 0);

// Draws the cluster from Mul(w), then the task from that cluster's
// distribution. A pure function of (cfg, seed).
TaskSpec SampleTask(const MixtureConfig& cfg, std::uint64_t seed, int task_id = 0);

struct MetaSplit {
  std::vector<TaskSpec> train;
  std::vector<TaskSpec> test;
};

// Train ids are [0, n_train), test ids are [n_train, n_train + n_test).
MetaSplit MakeMetaSplit(const MixtureConfig& cfg, int n_train, int n_test, std::uint64_t seed);

}  // namespace taskclust

#endif  // TASKCLUST_TASK_DISTRIBUTION_HPP_
