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


#ifndef TASKCLUST_TRAINER_HPP_
#define TASKCLUST_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "taskclust/cbvi.hpp"
#include "taskclust/config.hpp"
#include "taskclust/evaluation.hpp"
#include "taskclust/metrics.hpp"
#include "taskclust/policy.hpp"
#include "taskclust/ppo.hpp"
#include "taskclust/rollout.hpp"
#include "taskclust/trajectory_store.hpp"

namespace taskclust {

struct IterationStats {
  std::vector<double> train_returns;
  std::map<std::string, double> losses;
};

// Meta-training loop: collect trials, store them, update both policies with
// PPO, then update the inference model from the trajectory store.
class Trainer {
 public:
  explicit Trainer(RunConfig cfg);
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  const RunConfig& config() const { return cfg_; }
  const std::string& fingerprint() const { return fingerprint_; }
  const MetaSplit& split() const { return split_; }
  const PointRobotEnv& env() const { return env_; }
  cbvi::CbviModel& model() { return *model_; }
  const cbvi::CbviModel& model() const { return *model_; }
  ActorCritic& explore() { return explore_; }
  ActorCritic& exploit() { return exploit_; }
  nn::Adam& explore_optimizer() { return explore_opt_; }
  nn::Adam& exploit_optimizer() { return exploit_opt_; }
  const TrajectoryStore& store() const { return store_; }
  long iteration() const { return iteration_; }
  long frames() const { return frames_; }

  Agent agent() const;
  TrialOptions Options(RolloutMode mode) const;

  // One loop iteration.
  IterationStats Iterate();
  // Held-out evaluation on the test split with a fixed seed.
  EvalReport EvaluateTest() const;

  // Runs the remaining iterations, writing metrics.jsonl, eval reports and
  // checkpoints into the output directory. Returns the final report.
  EvalReport Run(const std::function<void(const MetricRecord&)>& on_record = {});

  void SaveCheckpoint(const std::string& path) const;
  // Restores parameters, optimiser states and counters. The config
  // fingerprint must match unless `allow_mismatch`.
  void LoadCheckpoint(const std::string& path, bool allow_mismatch = false);

  std::string OutputPath(const std::string& name) const;

 private:
  nn::ParameterList AllParameters() const;

  RunConfig cfg_;
  std::string fingerprint_;
  PointRobotEnv env_;
  MetaSplit split_;
  std::unique_ptr<cbvi::CbviModel> model_;
  ActorCritic explore_;
  ActorCritic exploit_;
  nn::Adam explore_opt_;
  nn::Adam exploit_opt_;
  RunningMoments explore_moments_;
  RunningMoments exploit_moments_;
  TrajectoryStore store_;
  long iteration_ = 0;
  long frames_ = 0;
};

struct TrainOutcome {
  std::string checkpoint_path;
  std::string metrics_path;
  EvalReport final_report;
};

TrainOutcome MetaTrain(const RunConfig& cfg,
                       const std::function<void(const MetricRecord&)>& on_record = {});

}  // namespace taskclust

#endif  // TASKCLUST_TRAINER_HPP_
