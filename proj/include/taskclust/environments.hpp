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

#ifndef TASKCLUST_ENVIRONMENTS_HPP_
#define TASKCLUST_ENVIRONMENTS_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taskclust/task_distribution.hpp"

namespace taskclust {

inline constexpr int kStateDim = 2;
inline constexpr int kActionDim = 2;
// (s, a, r, s') flattened.
inline constexpr int kTransitionDim = 2 * kStateDim + kActionDim + 1;

enum class DenseNorm { kL2, kL1 };

struct EnvConfig {
  int horizon = 100;
  double action_limit = 0.1;
  double control_cost = 0.01;
  DenseNorm dense_norm = DenseNorm::kL2;
  // Shared goal of the dynamics family; only the dynamics differ per task.
  Vec2 dynamics_goal{2.0, 0.0};
  // Per-unit-multiplier effect of each dynamics parameter set.
  double rotation_unit = M_PI / 12.0;
  double drift_unit = 0.01;
  double noise_unit = 0.02;

  std::vector<std::string> Validate() const;
};

struct EnvState {
  Vec2 position = Vec2::Zero();
  int step_index = 0;
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
};

class EpisodeOverrun : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Transition {
  Vec2 state = Vec2::Zero();
  Vec2 action = Vec2::Zero();
  double reward = 0.0;
  Vec2 next_state = Vec2::Zero();
};

using Trajectory = std::vector<Transition>;

// One exploration episode followed by N exploitation episodes.
struct Trial {
  int task_id = 0;
  int cluster_id = 0;
  std::vector<Trajectory> episodes;

  std::size_t NumTransitions() const;
  // tau^+ flattened in time order.
  Trajectory Flatten() const;
};

// Effective per-step displacement for an already clipped action.
struct PointDynamics {
  double gain = 1.0;
  double rotation = 0.0;
  Vec2 drift = Vec2::Zero();
  double noise_std = 0.0;
};

// 2D point robot starting at the origin with fixed-length episodes.
class PointRobotEnv {
 public:
  explicit PointRobotEnv(EnvConfig config = {});

  const EnvConfig& config() const { return config_; }

  EnvState Reset(const TaskSpec& task) const;
  // Throws EpisodeOverrun when called on a finished episode.
  StepResult Step(const TaskSpec& task, const EnvState& state, const Vec2& action) const;

  Vec2 ClipAction(const Vec2& action) const;
  PointDynamics DynamicsFor(const TaskSpec& task) const;
  double Reward(const TaskSpec& task, const Vec2& next_position, const Vec2& clipped_action) const;

 private:
  EnvConfig config_;
};

// Sparse goal reward: t - |x - g|_1 inside the L1 ball of radius t, else 0.
double SparseGoalReward(const Vec2& position, const Vec2& goal, double threshold);

using EpisodePolicy = std::function<Vec2(const EnvState&)>;
using TransitionObserver = std::function<void(const Transition&)>;

// Rolls a full episode of exactly `horizon` transitions. The observer sees
// each transition before the policy is queried again.
Trajectory RunEpisode(const PointRobotEnv& env, const TaskSpec& task, const EpisodePolicy& policy,
                      const TransitionObserver& observer = {});

}  // namespace taskclust

#endif  // TASKCLUST_ENVIRONMENTS_HPP_
