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


#include <doctest.h>

#include <cmath>

#include "taskclust/environments.hpp"

using taskclust::EnvConfig;
using taskclust::MixtureConfig;
using taskclust::PointRobotEnv;
using taskclust::TaskFamily;
using taskclust::TaskSpec;
using taskclust::Vec2;

namespace {

TaskSpec GoalTask(Vec2 goal) {
  TaskSpec t;
  t.goal = goal;
  return t;
}

}  // namespace

TEST_CASE("sparse reward rule") {
  CHECK(taskclust::SparseGoalReward(Vec2(1.0, 0.0), Vec2(0.0, 0.0), 3.0) == doctest::Approx(2.0));
  CHECK(taskclust::SparseGoalReward(Vec2(2.5, 1.5), Vec2(0.0, 0.0), 3.0) == 0.0);
  // Continuous at the boundary.
  CHECK(taskclust::SparseGoalReward(Vec2(2.999999, 0.0), Vec2(0.0, 0.0), 3.0) < 1e-5);
}

TEST_CASE("dense reward is zero at the goal without control cost") {
  EnvConfig cfg;
  cfg.control_cost = 0.0;
  PointRobotEnv env(cfg);
  const TaskSpec t = GoalTask(Vec2(0.05, -0.02));
  const auto r = env.Step(t, env.Reset(t), Vec2(0.05, -0.02));
  CHECK(std::abs(r.reward) < 1e-12);
  CHECK(env.Reward(t, Vec2(1.0, 0.0), Vec2::Zero()) < 0.0);
}

TEST_CASE("reset places the robot at the origin") {
  PointRobotEnv env;
  MixtureConfig goal_cfg;
  MixtureConfig dyn_cfg;
  dyn_cfg.family = TaskFamily::kDynamicsClustered;
  for (const TaskSpec& t : {taskclust::SampleTask(goal_cfg, 1), taskclust::SampleTask(dyn_cfg, 1)}) {
    const auto s = env.Reset(t);
    CHECK(s.position == Vec2::Zero());
    CHECK(s.step_index == 0);
    CHECK(env.Reset(t).position == s.position);
  }
}

TEST_CASE("zero policy stays at the origin for H steps") {
  PointRobotEnv env;
  const TaskSpec t = GoalTask(Vec2(1.0, 1.0));
  const auto traj = taskclust::RunEpisode(env, t, [](const auto&) { return Vec2::Zero(); });
  CHECK(traj.size() == 100);
  for (const auto& tr : traj) CHECK(tr.next_state == Vec2::Zero());
}

TEST_CASE("constant action integrates to 10 * gain") {
  PointRobotEnv env;
  const TaskSpec t = GoalTask(Vec2(1.0, 1.0));
  const auto traj = taskclust::RunEpisode(env, t, [](const auto&) { return Vec2(0.1, 0.0); });
  CHECK(traj.back().next_state[0] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(traj.back().next_state[1] == doctest::Approx(0.0));
}

TEST_CASE("actions are clipped per component") {
  PointRobotEnv env;
  CHECK(env.ClipAction(Vec2(0.5, -0.3)) == Vec2(0.1, -0.1));
  const TaskSpec t = GoalTask(Vec2(1.0, 1.0));
  const auto r = env.Step(t, env.Reset(t), Vec2(5.0, 0.05));
  CHECK(r.next_state.position[0] == doctest::Approx(0.1));
  CHECK(r.next_state.position[1] == doctest::Approx(0.05));
}

TEST_CASE("sparse task covering the origin rewards the first step") {
  PointRobotEnv env;
  TaskSpec t = GoalTask(Vec2(0.3, 0.2));
  t.sparse_threshold = 1.0;
  const auto traj = taskclust::RunEpisode(env, t, [](const auto&) { return Vec2::Zero(); });
  CHECK(traj.front().reward == doctest::Approx(1.0 - 0.5));
}

TEST_CASE("stepping a finished episode throws") {
  EnvConfig cfg;
  cfg.horizon = 3;
  PointRobotEnv env(cfg);
  const TaskSpec t = GoalTask(Vec2(1.0, 0.0));
  auto s = env.Reset(t);
  for (int i = 0; i < 3; ++i) {
    const auto r = env.Step(t, s, Vec2::Zero());
    CHECK(r.done == (i == 2));
    s = r.next_state;
  }
  CHECK_THROWS_AS(env.Step(t, s, Vec2::Zero()), taskclust::EpisodeOverrun);
}

TEST_CASE("identical tasks and actions give identical trajectories") {
  PointRobotEnv env;
  MixtureConfig cfg;
  cfg.family = TaskFamily::kDynamicsClustered;
  const TaskSpec t = taskclust::SampleTask(cfg, 5);
  auto policy = [](const taskclust::EnvState& s) {
    return Vec2(0.1 * std::sin(s.step_index), 0.05);
  };
  const auto a = taskclust::RunEpisode(env, t, policy);
  const auto b = taskclust::RunEpisode(env, t, policy);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].next_state == b[i].next_state);
    CHECK(a[i].reward == b[i].reward);
  }
}

TEST_CASE("dynamics clusters differ on some transition") {
  PointRobotEnv env;
  MixtureConfig cfg;
  cfg.family = TaskFamily::kDynamicsClustered;
  std::vector<TaskSpec> per_cluster(4);
  std::vector<bool> found(4, false);
  for (int i = 0; i < 200; ++i) {
    const TaskSpec t = taskclust::SampleTask(cfg, i, i);
    if (!found[t.cluster_id]) {
      per_cluster[t.cluster_id] = t;
      found[t.cluster_id] = true;
    }
  }
  const Vec2 a(0.1, 0.05);
  for (int c = 0; c < 4; ++c) {
    for (int d = c + 1; d < 4; ++d) {
      const auto& tc = per_cluster[c];
      const auto& td = per_cluster[d];
      const Vec2 xc = env.Step(tc, env.Reset(tc), a).next_state.position;
      const Vec2 xd = env.Step(td, env.Reset(td), a).next_state.position;
      CHECK((xc - xd).norm() > 1e-9);
    }
  }
}
