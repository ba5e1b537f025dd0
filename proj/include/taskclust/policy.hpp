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


#ifndef TASKCLUST_POLICY_HPP_
#define TASKCLUST_POLICY_HPP_

#include <string>
#include <vector>

#include "taskclust/autodiff.hpp"
#include "taskclust/nn.hpp"
#include "taskclust/random.hpp"

namespace taskclust {

using ad::Matrix;
using ad::Var;

struct PolicyConfig {
  std::vector<int> hidden{64, 64};
  double init_log_std = 0.0;
  double min_log_std = -5.0;
  double max_log_std = 2.0;
  // Environment action = action_scale * raw Gaussian sample.
  double action_scale = 0.1;
  // Standardise inputs with running statistics gathered from rollouts.
  bool normalize_inputs = true;
  double input_clip = 10.0;

  std::vector<std::string> Validate() const;
};

// Per-dimension running mean and variance of policy inputs.
class FeatureNormalizer {
 public:
  FeatureNormalizer() = default;
  explicit FeatureNormalizer(int dim);

  // (x - mean) / sqrt(var + 1e-8) clipped to [-clip, clip]; identity until
  // the first update.
  Matrix Apply(const Matrix& raw, double clip) const;
  // Merges the statistics of the columns of `raw`.
  void Update(const Matrix& raw);

  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& m2() const { return m2_; }
  void SetState(double count, Eigen::VectorXd mean, Eigen::VectorXd m2);

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
};

// Policy input: (s, z_c, q(c), t / H).
int PolicyInputDim(int latent_dim, int num_clusters);
Eigen::VectorXd PolicyFeatures(const Eigen::Vector2d& state, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& cluster_probs, int step, int horizon);

// Diagonal Gaussian actor with a state-independent log-std, and a separate
// value network. All quantities refer to the raw (unscaled) action.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(int input_dim, const PolicyConfig& config, Rng& rng);

  // Raw features to network inputs.
  Matrix Normalize(const Matrix& raw) const;
  FeatureNormalizer& mutable_normalizer() { return normalizer_; }
  const FeatureNormalizer& normalizer() const { return normalizer_; }

  Var Mean(const Var& features) const;  // kActionDim x B
  Var LogStd() const;                   // kActionDim x 1, clamped
  Var Value(const Var& features) const; // 1 x B
  // log N(raw | mean, std) summed over action dims: 1 x B.
  Var LogProb(const Var& mean, const Matrix& raw_actions) const;
  // Differential entropy of the action distribution (same for every state).
  Var Entropy() const;

  int input_dim() const { return input_dim_; }
  const PolicyConfig& config() const { return config_; }
  void Register(const std::string& prefix, nn::ParameterList& params) const;
  nn::ParameterList Parameters() const;

 private:
  int input_dim_ = 0;
  PolicyConfig config_;
  nn::Mlp actor_;
  Var log_std_;
  nn::Mlp critic_;
  FeatureNormalizer normalizer_;
};

// Pure helper matching ActorCritic::LogProb, for tests and rollouts.
double GaussianLogProb(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::VectorXd& log_std);

}  // namespace taskclust

#endif  // TASKCLUST_POLICY_HPP_
