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

#include "taskclust/environments.hpp"

#include <Eigen/Geometry>

#include <cmath>

#include "taskclust/random.hpp"

namespace taskclust {

std::vector<std::string> EnvConfig::Validate() const {
  std::vector<std::string> errors;
  if (horizon < 1) errors.push_back("env.horizon: must be >= 1");
  if (!(action_limit > 0.0)) errors.push_back("env.action_limit: must be positive");
  if (!(control_cost >= 0.0)) errors.push_back("env.control_cost: must be nonnegative");
  return errors;
}

std::size_t Trial::NumTransitions() const {
  std::size_t n = 0;
  for (const auto& e : episodes) n += e.size();
  return n;
}

Trajectory Trial::Flatten() const {
  Trajectory flat;
  flat.reserve(NumTransitions());
  for (const auto& e : episodes) flat.insert(flat.end(), e.begin(), e.end());
  return flat;
}

double SparseGoalReward(const Vec2& position, const Vec2& goal, double threshold) {
  const double d1 = (position - goal).lpNorm<1>();
  return d1 <= threshold ? threshold - d1 : 0.0;
}

PointRobotEnv::PointRobotEnv(EnvConfig config) : config_(std::move(config)) {}

EnvState PointRobotEnv::Reset(const TaskSpec& /*task*/) const { return EnvState{}; }

Vec2 PointRobotEnv::ClipAction(const Vec2& action) const {
  return action.cwiseMax(-config_.action_limit).cwiseMin(config_.action_limit);
}

PointDynamics PointRobotEnv::DynamicsFor(const TaskSpec& task) const {
  PointDynamics d;
  if (!task.dynamics) return d;
  const auto& m = task.dynamics->multipliers;
  switch (task.dynamics->param_set) {
    case DynamicsParamSet::kGain: d.gain = m.at(0); break;
    case DynamicsParamSet::kRotation: d.rotation = m.at(0) * config_.rotation_unit; break;
    case DynamicsParamSet::kDrift: d.drift = Vec2(m.at(0), m.at(1)) * config_.drift_unit; break;
    case DynamicsParamSet::kNoise: d.noise_std = std::abs(m.at(0)) * config_.noise_unit; break;
  }
  return d;
}

double PointRobotEnv::Reward(const TaskSpec& task, const Vec2& next_position,
                             const Vec2& clipped_action) const {
  if (!task.goal) return -(next_position - config_.dynamics_goal).norm();
  if (task.sparse_threshold) {
    return SparseGoalReward(next_position, *task.goal, *task.sparse_threshold);
  }
  const Vec2 diff = next_position - *task.goal;
  const double dist = config_.dense_norm == DenseNorm::kL2 ? diff.norm() : diff.lpNorm<1>();
  return -dist - config_.control_cost * clipped_action.squaredNorm();
}

StepResult PointRobotEnv::Step(const TaskSpec& task, const EnvState& state,
                               const Vec2& action) const {
  if (state.step_index >= config_.horizon) {
    throw EpisodeOverrun("step called after the episode ended (step_index " +
                         std::to_string(state.step_index) + ")");
  }
  const Vec2 a = ClipAction(action);
  Vec2 displacement = a;
  if (task.dynamics) {
    const PointDynamics d = DynamicsFor(task);
    displacement = d.gain * (Eigen::Rotation2Dd(d.rotation) * a) + d.drift;
    if (d.noise_std > 0.0) {
      const auto k = static_cast<std::uint64_t>(state.step_index);
      displacement += d.noise_std * Vec2(HashNormal(task.noise_seed, 2 * k),
                                         HashNormal(task.noise_seed, 2 * k + 1));
    }
  }
  StepResult out;
  out.next_state.position = state.position + displacement;
  out.next_state.step_index = state.step_index + 1;
  out.reward = Reward(task, out.next_state.position, a);
  out.done = out.next_state.step_index == config_.horizon;
  return out;
}

Trajectory RunEpisode(const PointRobotEnv& env, const TaskSpec& task, const EpisodePolicy& policy,
                      const TransitionObserver& observer) {
  Trajectory traj;
  traj.reserve(static_cast<std::size_t>(env.config().horizon));
  EnvState s = env.Reset(task);
  bool done = false;
  while (!done) {
    const Vec2 a = policy(s);
    StepResult r = env.Step(task, s, a);
    Transition tr{s.position, env.ClipAction(a), r.reward, r.next_state.position};
    traj.push_back(tr);
    if (observer) observer(tr);
    s = r.next_state;
    done = r.done;
  }
  return traj;
}

}  // namespace taskclust
