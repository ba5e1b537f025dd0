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


#ifndef TASKCLUST_PPO_HPP_
#define TASKCLUST_PPO_HPP_

#include <string>
#include <vector>

#include "taskclust/nn.hpp"
#include "taskclust/policy.hpp"
#include "taskclust/random.hpp"

namespace taskclust {

struct PpoConfig {
  double learning_rate = 1e-4;
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double huber_delta = 1.0;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int epochs = 4;
  int minibatch = 256;
  double max_grad_norm = 0.5;
  // Divide rewards by a running std of discounted returns.
  bool normalize_returns = true;
  bool normalize_advantages = true;

  std::vector<std::string> Validate() const;
};

// Per-step on-policy samples of one policy. Columns are steps; a segment of
// consecutive steps ending with episode_end = true is one episode.
struct RolloutBatch {
  Matrix features;     // F x N policy inputs (posterior snapshot included)
  Matrix raw_features; // F x N inputs before normalisation
  Matrix raw_actions;  // kActionDim x N
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> env_rewards;
  // Training reward: r_e on exploration steps, the env reward otherwise.
  std::vector<double> rewards;
  std::vector<int> episode_index;
  std::vector<int> trial_id;
  std::vector<bool> episode_end;
  // Filled by ComputeAdvantages.
  std::vector<double> advantages;
  std::vector<double> returns;

  int size() const { return static_cast<int>(log_probs.size()); }
  bool empty() const { return log_probs.empty(); }
  // Appends the columns of `other`.
  void Append(const RolloutBatch& other);
};

// Welford running mean / variance.
class RunningMoments {
 public:
  void Update(double x);
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_) : 1.0; }
  long count() const { return count_; }
  void SetState(long count, double mean, double m2) {
    count_ = count;
    mean_ = mean;
    m2_ = m2;
  }
  double m2() const { return m2_; }

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Scales `batch.rewards` by 1 / std of discounted returns, updating the
// running statistics with this batch first.
void NormalizeRewards(RolloutBatch& batch, double gamma, RunningMoments& moments);

// Generalised advantage estimation per episode segment; the value after an
// episode end is zero (fixed horizon, time is part of the input).
void ComputeAdvantages(RolloutBatch& batch, double gamma, double lambda);

struct PpoDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  double grad_norm = 0.0;
  int minibatches = 0;
};

// Clipped-surrogate loss of one minibatch given by column indices.
struct PpoLoss {
  Var total;
  Var policy;
  Var value;
  Var entropy;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};
PpoLoss ComputePpoLoss(const ActorCritic& net, const RolloutBatch& batch,
                       const std::vector<int>& columns, const std::vector<double>& advantages,
                       const PpoConfig& cfg);

// epochs x shuffled minibatches of gradient steps. Throws std::runtime_error
// when a loss is not finite.
PpoDiagnostics PpoUpdate(const ActorCritic& net, nn::Adam& optimizer, const RolloutBatch& batch,
                         const PpoConfig& cfg, Rng& rng);

}  // namespace taskclust

#endif  // TASKCLUST_PPO_HPP_
