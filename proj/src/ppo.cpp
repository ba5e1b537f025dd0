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


#include "taskclust/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace taskclust {

std::vector<std::string> PpoConfig::Validate() const {
  std::vector<std::string> errors;
  if (!(learning_rate >= 0.0)) errors.push_back("ppo.learning_rate: must be nonnegative");
  if (!(clip > 0.0)) errors.push_back("ppo.clip: must be positive");
  if (!(value_coef >= 0.0)) errors.push_back("ppo.value_coef: must be nonnegative");
  if (!(huber_delta > 0.0)) errors.push_back("ppo.huber_delta: must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) errors.push_back("ppo.gamma: must be in (0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) errors.push_back("ppo.gae_lambda: must be in [0, 1]");
  if (epochs < 1) errors.push_back("ppo.epochs: must be >= 1");
  if (minibatch < 1) errors.push_back("ppo.minibatch: must be >= 1");
  if (!(max_grad_norm > 0.0)) errors.push_back("ppo.max_grad_norm: must be positive");
  return errors;
}

void RolloutBatch::Append(const RolloutBatch& other) {
  if (other.empty()) return;
  if (empty()) {
    *this = other;
    return;
  }
  auto hcat = [](Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("RolloutBatch: feature size mismatch");
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    a = std::move(out);
  };
  hcat(features, other.features);
  hcat(raw_features, other.raw_features);
  hcat(raw_actions, other.raw_actions);
  auto cat = [](auto& a, const auto& b) { a.insert(a.end(), b.begin(), b.end()); };
  cat(log_probs, other.log_probs);
  cat(values, other.values);
  cat(env_rewards, other.env_rewards);
  cat(rewards, other.rewards);
  cat(episode_index, other.episode_index);
  cat(trial_id, other.trial_id);
  cat(episode_end, other.episode_end);
  cat(advantages, other.advantages);
  cat(returns, other.returns);
}

void RunningMoments::Update(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void NormalizeRewards(RolloutBatch& batch, double gamma, RunningMoments& moments) {
  double ret = 0.0;
  for (int i = 0; i < batch.size(); ++i) {
    ret = gamma * ret + batch.rewards[i];
    moments.Update(ret);
    if (batch.episode_end[i]) ret = 0.0;
  }
  const double scale = 1.0 / std::sqrt(moments.variance() + 1e-8);
  for (double& r : batch.rewards) r *= scale;
}

void ComputeAdvantages(RolloutBatch& batch, double gamma, double lambda) {
  const int n = batch.size();
  batch.advantages.assign(n, 0.0);
  batch.returns.assign(n, 0.0);
  double gae = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    const bool last = batch.episode_end[i] || i == n - 1;
    const double next_value = last ? 0.0 : batch.values[i + 1];
    if (last) gae = 0.0;
    const double delta = batch.rewards[i] + gamma * next_value - batch.values[i];
    gae = delta + gamma * lambda * gae;
    batch.advantages[i] = gae;
    batch.returns[i] = gae + batch.values[i];
  }
}

namespace {

Matrix SelectColumns(const Matrix& m, const std::vector<int>& cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = m.col(cols[j]);
  return out;
}

Matrix SelectRow(const std::vector<double>& v, const std::vector<int>& cols) {
  Matrix out(1, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out(0, j) = v[cols[j]];
  return out;
}

}  // namespace

PpoLoss ComputePpoLoss(const ActorCritic& net, const RolloutBatch& batch,
                       const std::vector<int>& columns, const std::vector<double>& advantages,
                       const PpoConfig& cfg) {
  const double n = static_cast<double>(columns.size());
  Var x = ad::Constant(SelectColumns(batch.features, columns));
  Var log_prob = net.LogProb(net.Mean(x), SelectColumns(batch.raw_actions, columns));
  const Matrix old_log_prob = SelectRow(batch.log_probs, columns);
  const Matrix adv = SelectRow(advantages, columns);

  Var ratio = ad::Exp(log_prob - ad::Constant(old_log_prob));
  Var unclipped = ratio * ad::Constant(adv);
  Var clipped = ad::Clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * ad::Constant(adv);
  PpoLoss loss;
  loss.policy = ad::Neg(ad::Mean(ad::Minimum(unclipped, clipped)));

  Var value = net.Value(x);
  loss.value = ad::Mean(ad::Huber(value - ad::Constant(SelectRow(batch.returns, columns)),
                                  cfg.huber_delta));
  loss.entropy = net.Entropy();
  loss.total = loss.policy + ad::Scale(loss.value, cfg.value_coef) -
               ad::Scale(loss.entropy, cfg.entropy_coef);

  const Matrix& r = ratio.value();
  const Matrix diff = old_log_prob - log_prob.value();
  loss.approx_kl = diff.mean();
  int clipped_count = 0;
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    if (std::abs(r(0, j) - 1.0) > cfg.clip) ++clipped_count;
  }
  loss.clip_fraction = clipped_count / n;
  return loss;
}

PpoDiagnostics PpoUpdate(const ActorCritic& net, nn::Adam& optimizer, const RolloutBatch& batch,
                         const PpoConfig& cfg, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("PpoUpdate: empty batch");
  if (static_cast<int>(batch.advantages.size()) != batch.size()) {
    throw std::invalid_argument("PpoUpdate: advantages not computed");
  }
  optimizer.config().learning_rate = cfg.learning_rate;

  std::vector<double> adv = batch.advantages;
  if (cfg.normalize_advantages && adv.size() > 1) {
    const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / adv.size();
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double std = std::sqrt(var / adv.size());
    for (double& a : adv) a = (a - mean) / (std + 1e-8);
  }

  std::vector<int> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  PpoDiagnostics d;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < batch.size(); start += cfg.minibatch) {
      const int end = std::min(batch.size(), start + cfg.minibatch);
      std::vector<int> cols(order.begin() + start, order.begin() + end);
      optimizer.ZeroGrad();
      PpoLoss loss = ComputePpoLoss(net, batch, cols, adv, cfg);
      const double total = loss.total.item();
      if (!std::isfinite(total)) {
        std::ostringstream msg;
        msg << "PPO loss is not finite (policy " << loss.policy.item() << ", value "
            << loss.value.item() << ", entropy " << loss.entropy.item() << ")";
        throw std::runtime_error(msg.str());
      }
      ad::Backward(loss.total);
      nn::ParameterList params = optimizer.params();
      d.grad_norm += params.ClipGradNorm(cfg.max_grad_norm);
      optimizer.Step();
      d.policy_loss += loss.policy.item();
      d.value_loss += loss.value.item();
      d.entropy += loss.entropy.item();
      d.approx_kl += loss.approx_kl;
      d.clip_fraction += loss.clip_fraction;
      ++d.minibatches;
    }
  }
  optimizer.ZeroGrad();
  const double m = std::max(1, d.minibatches);
  d.policy_loss /= m;
  d.value_loss /= m;
  d.entropy /= m;
  d.approx_kl /= m;
  d.clip_fraction /= m;
  d.grad_norm /= m;
  return d;
}

}  // namespace taskclust
