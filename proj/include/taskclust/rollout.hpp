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


#ifndef TASKCLUST_ROLLOUT_HPP_
#define TASKCLUST_ROLLOUT_HPP_

#include <cstdint>
#include <vector>

#include "taskclust/cbvi.hpp"
#include "taskclust/environments.hpp"
#include "taskclust/intrinsic_rewards.hpp"
#include "taskclust/policy.hpp"
#include "taskclust/ppo.hpp"

namespace taskclust {

enum class RolloutMode { kTrain, kTest };

// Read-only view of the networks used to act.
struct Agent {
  const cbvi::Encoder* encoder = nullptr;
  const ActorCritic* explore = nullptr;  // pi_psi
  const ActorCritic* exploit = nullptr;  // pi_phi
};

struct TrialOptions {
  RolloutMode mode = RolloutMode::kTrain;
  int exploit_episodes = 1;
  // false: pi_phi rolls every episode and no shaping is applied.
  bool exploration_enabled = true;
  DecaySchedule schedule;
  double gumbel_temperature = 1.0;
  double action_scale = 0.1;
  // Trials are simulated in lockstep groups of this size; results do not
  // depend on the worker count.
  int chunk = 16;
  int workers = 1;
};

struct EpisodeRecord {
  Trajectory transitions;
  // C x (H + 1): q(c | tau_:t) before each step and after the last one.
  Matrix cluster_probs;
  std::vector<double> r_h;
  std::vector<double> r_c;
  // Reward the policy is trained on (r_e for exploration steps).
  std::vector<double> shaped_rewards;
  // Cluster fed to the policy at each step.
  std::vector<int> chosen_clusters;
  bool exploration = false;
  double env_return = 0.0;
  // On-policy samples for the policy that rolled this episode.
  RolloutBatch samples;

  // argmax_c q(c | tau_:t) for t = 1..H, lowest index on ties.
  std::vector<int> InferredClusters() const;
};

struct TrialResult {
  TaskSpec task;
  std::vector<EpisodeRecord> episodes;
  // Encoder state at the end of the exploration episode and at the start of
  // the first exploitation episode.
  cbvi::PosteriorState exploration_final;
  cbvi::PosteriorState exploitation_initial;

  Trajectory Flatten() const;
  std::vector<double> Returns() const;
};

// Single-column slice of a batched posterior.
cbvi::PosteriorState PosteriorColumn(const cbvi::PosteriorState& ps, int b);

// Runs one trial per task; trial i draws all of its noise from seeds[i].
std::vector<TrialResult> RunTrials(const std::vector<TaskSpec>& tasks,
                                   const std::vector<std::uint64_t>& seeds, const Agent& agent,
                                   const PointRobotEnv& env, const TrialOptions& options);

TrialResult RunTrial(const TaskSpec& task, std::uint64_t seed, const Agent& agent,
                     const PointRobotEnv& env, const TrialOptions& options);

}  // namespace taskclust

#endif  // TASKCLUST_ROLLOUT_HPP_
