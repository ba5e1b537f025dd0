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


#include "taskclust/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "taskclust/environments.hpp"

namespace taskclust {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

std::vector<std::string> PolicyConfig::Validate() const {
  std::vector<std::string> errors;
  if (hidden.empty()) errors.push_back("policy.hidden: need at least one layer");
  for (int h : hidden) {
    if (h < 1) errors.push_back("policy.hidden: layer sizes must be >= 1");
  }
  if (!(min_log_std < max_log_std)) errors.push_back("policy.min_log_std: must be < max_log_std");
  if (!(init_log_std >= min_log_std && init_log_std <= max_log_std)) {
    errors.push_back("policy.init_log_std: outside [min_log_std, max_log_std]");
  }
  if (!(action_scale > 0.0)) errors.push_back("policy.action_scale: must be positive");
  if (!(input_clip > 0.0)) errors.push_back("policy.input_clip: must be positive");
  return errors;
}

int PolicyInputDim(int latent_dim, int num_clusters) {
  return kStateDim + latent_dim + num_clusters + 1;
}

Eigen::VectorXd PolicyFeatures(const Eigen::Vector2d& state, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& cluster_probs, int step, int horizon) {
  Eigen::VectorXd f(PolicyInputDim(static_cast<int>(z.size()),
                                   static_cast<int>(cluster_probs.size())));
  f << state, z, cluster_probs, static_cast<double>(step) / horizon;
  return f;
}

ActorCritic::ActorCritic(int input_dim, const PolicyConfig& config, Rng& rng)
    : input_dim_(input_dim), config_(config) {
  actor_ = nn::Mlp(input_dim, config.hidden, kActionDim, rng);
  // Small initial output layer keeps the initial mean near zero.
  nn::Linear& out = actor_.layers.back();
  out.weight.mutable_value() *= 0.01;
  out.bias.mutable_value().setZero();
  log_std_ = Var::Parameter(Matrix::Constant(kActionDim, 1, config.init_log_std));
  critic_ = nn::Mlp(input_dim, config.hidden, 1, rng);
  normalizer_ = FeatureNormalizer(input_dim);
}

Matrix ActorCritic::Normalize(const Matrix& raw) const {
  if (!config_.normalize_inputs) return raw;
  return normalizer_.Apply(raw, config_.input_clip);
}

FeatureNormalizer::FeatureNormalizer(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

Matrix FeatureNormalizer::Apply(const Matrix& raw, double clip) const {
  if (count_ < 2.0) return raw;
  if (raw.rows() != mean_.size()) throw std::invalid_argument("FeatureNormalizer: size mismatch");
  const Eigen::VectorXd inv_std = ((m2_ / count_).array() + 1e-8).rsqrt().matrix();
  Matrix out = (raw.colwise() - mean_).array().colwise() * inv_std.array();
  return out.cwiseMax(-clip).cwiseMin(clip);
}

void FeatureNormalizer::Update(const Matrix& raw) {
  if (raw.cols() == 0) return;
  if (raw.rows() != mean_.size()) throw std::invalid_argument("FeatureNormalizer: size mismatch");
  const double n = static_cast<double>(raw.cols());
  const Eigen::VectorXd batch_mean = raw.rowwise().mean();
  const Eigen::VectorXd batch_m2 = (raw.colwise() - batch_mean).rowwise().squaredNorm();
  const double total = count_ + n;
  const Eigen::VectorXd delta = batch_mean - mean_;
  mean_ += delta * (n / total);
  m2_ += batch_m2 + delta.cwiseAbs2() * (count_ * n / total);
  count_ = total;
}

void FeatureNormalizer::SetState(double count, Eigen::VectorXd mean, Eigen::VectorXd m2) {
  if (mean.size() != m2.size()) throw std::invalid_argument("FeatureNormalizer: size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  m2_ = std::move(m2);
}

Var ActorCritic::Mean(const Var& features) const { return actor_(features); }

Var ActorCritic::LogStd() const {
  return ad::Clamp(log_std_, config_.min_log_std, config_.max_log_std);
}

Var ActorCritic::Value(const Var& features) const { return critic_(features); }

Var ActorCritic::LogProb(const Var& mean, const Matrix& raw_actions) const {
  const Eigen::Index batch = raw_actions.cols();
  Var log_std = ad::RepeatCols(LogStd(), batch);
  Var z = (ad::Constant(raw_actions) - mean) * ad::Exp(ad::Neg(log_std));
  Var per_dim = ad::AddScalar(ad::Neg(ad::Scale(ad::Square(z), 0.5) + log_std), -kLogSqrt2Pi);
  return ad::SumRows(per_dim);
}

Var ActorCritic::Entropy() const {
  return ad::AddScalar(ad::Sum(LogStd()), kActionDim * (0.5 + kLogSqrt2Pi));
}

void ActorCritic::Register(const std::string& prefix, nn::ParameterList& params) const {
  actor_.Register(prefix + "actor.", params);
  params.Add(prefix + "log_std", log_std_);
  critic_.Register(prefix + "critic.", params);
}

nn::ParameterList ActorCritic::Parameters() const {
  nn::ParameterList params;
  Register("", params);
  return params;
}

double GaussianLogProb(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                       const Eigen::VectorXd& log_std) {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z = (x[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kLogSqrt2Pi;
  }
  return lp;
}

}  // namespace taskclust
