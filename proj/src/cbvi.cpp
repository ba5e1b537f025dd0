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

#include "taskclust/cbvi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace taskclust::cbvi {
namespace {

Matrix OneHotColumns(int num_clusters, int cluster, int batch) {
  Matrix m = Matrix::Zero(num_clusters, batch);
  m.row(cluster).setOnes();
  return m;
}

Matrix GumbelNoise(int rows, int cols, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double x = std::min(std::max(u(rng), 1e-300), 1.0 - 1e-16);
      g(i, j) = -std::log(-std::log(x));
    }
  }
  return g;
}

Matrix NormalNoise(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

}  // namespace

std::vector<std::string> CbviConfig::Validate() const {
  std::vector<std::string> errors;
  if (num_clusters < 1) errors.push_back("cbvi.num_clusters: must be >= 1");
  if (latent_dim < 1) errors.push_back("cbvi.latent_dim: must be >= 1");
  if (embed_dim < 1) errors.push_back("cbvi.embed_dim: must be >= 1");
  if (cluster_hidden < 1) errors.push_back("cbvi.cluster_hidden: must be >= 1");
  if (task_hidden < 1) errors.push_back("cbvi.task_hidden: must be >= 1");
  if (decoder_hidden < 1) errors.push_back("cbvi.decoder_hidden: must be >= 1");
  if (!(lambda_s >= 0.0)) errors.push_back("cbvi.lambda_s: must be nonnegative");
  if (!(lambda_i >= 0.0)) errors.push_back("cbvi.lambda_i: must be nonnegative");
  if (!(lambda_p >= 0.0)) errors.push_back("cbvi.lambda_p: must be nonnegative");
  if (!(gumbel_temperature > 0.0)) errors.push_back("cbvi.gumbel_temperature: must be positive");
  if (elbo_stride < 1) errors.push_back("cbvi.elbo_stride: must be >= 1");
  if (mc_samples < 1) errors.push_back("cbvi.mc_samples: must be >= 1");
  if (decode_subsample < 0) errors.push_back("cbvi.decode_subsample: must be >= 0");
  if (!(learning_rate >= 0.0)) errors.push_back("cbvi.learning_rate: must be nonnegative");
  if (target_sync_interval < 1) errors.push_back("cbvi.target_sync_interval: must be >= 1");
  if (batch_trials < 1) errors.push_back("cbvi.batch_trials: must be >= 1");
  if (updates_per_iteration < 0) errors.push_back("cbvi.updates_per_iteration: must be >= 0");
  if (!(prior_init_std >= 0.0)) errors.push_back("cbvi.prior_init_std: must be nonnegative");
  if (!(action_scale > 0.0)) errors.push_back("cbvi.action_scale: must be positive");
  return errors;
}

Eigen::VectorXd TransitionFeatures(const Transition& tr, double action_scale) {
  Eigen::VectorXd f(kTransitionDim);
  f << tr.state, tr.action / action_scale, tr.reward, tr.next_state;
  return f;
}

Eigen::VectorXd PosteriorState::ClusterProbs(int b) const {
  const Eigen::VectorXd l = cluster_logits.col(b);
  Eigen::VectorXd e = (l.array() - l.maxCoeff()).exp();
  return e / e.sum();
}

Matrix PosteriorState::ClusterProbs() const {
  Matrix p(cluster_logits.rows(), cluster_logits.cols());
  for (int b = 0; b < batch(); ++b) p.col(b) = ClusterProbs(b);
  return p;
}

Matrix SampleCluster(const Matrix& logits, double temperature, ClusterSampling mode, Rng& rng) {
  if (mode == ClusterSampling::kArgmax) return ad::ArgmaxOneHot(logits);
  if (!(temperature > 0.0)) throw std::invalid_argument("SampleCluster: temperature must be > 0");
  const Matrix perturbed =
      (logits + GumbelNoise(static_cast<int>(logits.rows()), static_cast<int>(logits.cols()), rng)) /
      temperature;
  // The tempered softmax is monotone in its input, so its argmax is the
  // argmax of the perturbed logits.
  return ad::ArgmaxOneHot(perturbed);
}

Matrix SampleLatent(const PosteriorState& ps, const Matrix& one_hot, const Matrix& eps) {
  const int d = static_cast<int>(ps.z_mean.front().rows());
  Matrix z(d, ps.batch());
  for (int b = 0; b < ps.batch(); ++b) {
    Eigen::Index c = 0;
    one_hot.col(b).maxCoeff(&c);
    z.col(b) = ps.z_mean[c].col(b).array() + ps.z_logstd[c].col(b).array().exp() * eps.col(b).array();
  }
  return z;
}

// ---------------------------------------------------------------------------
// Encoder

Encoder::Encoder(const CbviConfig& config, Rng& rng) : config_(config) {
  embed_ = nn::Linear(kTransitionDim, config.embed_dim, rng);
  cluster_gru_ = nn::GruCell(config.embed_dim, config.cluster_hidden, rng);
  int task_dim = config.cluster_hidden;
  if (config.stacked) {
    task_gru_ = nn::GruCell(config.embed_dim + config.cluster_hidden, config.task_hidden, rng);
    task_dim = config.task_hidden;
  }
  cluster_head_ = nn::Linear(config.cluster_hidden, config.num_clusters, rng);
  z_mean_head_ = nn::Linear(task_dim + config.num_clusters, config.latent_dim, rng);
  z_logstd_head_ = nn::Linear(task_dim + config.num_clusters, config.latent_dim, rng);
}

Encoder::Step Encoder::InitialStep(int batch) const {
  Step s;
  s.h_alpha = ad::Constant(Matrix::Zero(config_.cluster_hidden, batch));
  s.h_beta = config_.stacked ? ad::Constant(Matrix::Zero(config_.task_hidden, batch)) : s.h_alpha;
  s.logits = cluster_head_(s.h_alpha);
  return s;
}

Encoder::Step Encoder::Advance(const Step& prev, const Var& x) const {
  if (x.rows() != kTransitionDim) {
    throw std::invalid_argument("Encoder: transition has " + std::to_string(x.rows()) +
                                " features, expected " + std::to_string(kTransitionDim));
  }
  if (x.cols() != prev.h_alpha.cols()) throw std::invalid_argument("Encoder: batch mismatch");
  Step s;
  Var e = ad::Tanh(embed_(x));
  s.h_alpha = cluster_gru_(e, prev.h_alpha);
  s.h_beta = config_.stacked ? task_gru_(ad::VCat({e, s.h_alpha}), prev.h_beta) : s.h_alpha;
  s.logits = cluster_head_(s.h_alpha);
  return s;
}

Var Encoder::ZMean(const Var& h_beta, const Var& cluster) const {
  return z_mean_head_(ad::VCat({h_beta, cluster}));
}

Var Encoder::ZLogStd(const Var& h_beta, const Var& cluster) const {
  return z_logstd_head_(ad::VCat({h_beta, cluster}));
}

PosteriorState Encoder::Snapshot(const Step& step) const {
  PosteriorState ps;
  ps.h_alpha = step.h_alpha.value();
  ps.h_beta = step.h_beta.value();
  ps.cluster_logits = step.logits.value();
  const int batch = static_cast<int>(ps.cluster_logits.cols());
  for (int c = 0; c < config_.num_clusters; ++c) {
    Var onehot = ad::Constant(OneHotColumns(config_.num_clusters, c, batch));
    ps.z_mean.push_back(ZMean(step.h_beta, onehot).value());
    ps.z_logstd.push_back(ZLogStd(step.h_beta, onehot).value());
  }
  return ps;
}

PosteriorState Encoder::InitialState(int batch) const {
  ad::NoGradGuard guard;
  return Snapshot(InitialStep(batch));
}

PosteriorState Encoder::EncodeStep(const PosteriorState& ps, const Matrix& x) const {
  ad::NoGradGuard guard;
  Step prev;
  prev.h_alpha = ad::Constant(ps.h_alpha);
  prev.h_beta = config_.stacked ? ad::Constant(ps.h_beta) : prev.h_alpha;
  return Snapshot(Advance(prev, ad::Constant(x)));
}

void Encoder::Register(const std::string& prefix, nn::ParameterList& params) const {
  embed_.Register(prefix + "embed.", params);
  cluster_gru_.Register(prefix + "cluster_gru.", params);
  if (config_.stacked) task_gru_.Register(prefix + "task_gru.", params);
  cluster_head_.Register(prefix + "cluster_head.", params);
  z_mean_head_.Register(prefix + "z_mean_head.", params);
  z_logstd_head_.Register(prefix + "z_logstd_head.", params);
}

// ---------------------------------------------------------------------------
// Decoders

TrialTensors TrialTensors::FromTrajectory(const Trajectory& traj, double action_scale) {
  const int n = static_cast<int>(traj.size());
  TrialTensors t;
  t.features.resize(kTransitionDim, n);
  t.reward_in.resize(6, n);
  t.state_in.resize(4, n);
  t.states.resize(2, n);
  t.next_states.resize(2, n);
  t.rewards.resize(1, n);
  for (int i = 0; i < n; ++i) {
    const Transition& tr = traj[static_cast<std::size_t>(i)];
    const Vec2 a = tr.action / action_scale;
    t.features.col(i) = TransitionFeatures(tr, action_scale);
    t.reward_in.col(i) << tr.state, a, tr.next_state;
    t.state_in.col(i) << tr.state, a;
    t.states.col(i) = tr.state;
    t.next_states.col(i) = tr.next_state;
    t.rewards(0, i) = tr.reward;
  }
  return t;
}

Decoders::Decoders(const CbviConfig& config, Rng& rng) : lambda_s_(config.lambda_s) {
  const int h = config.decoder_hidden;
  reward_in_ = nn::Linear(6, h, rng);
  reward_z_ = nn::Linear(config.latent_dim, h, rng);
  reward_out_ = nn::Linear(h, 1, rng);
  state_in_ = nn::Linear(4, h, rng);
  state_z_ = nn::Linear(config.latent_dim, h, rng);
  state_out_ = nn::Linear(h, kStateDim, rng);
}

Var Decoders::PredictRewards(const Var& reward_in, const Var& z) const {
  Var hidden = ad::Tanh(ad::PairAdd(reward_in_(reward_in), reward_z_(z)));
  return reward_out_(hidden);
}

Var Decoders::PredictStates(const Var& state_in, const Var& states, const Var& z) const {
  Var hidden = ad::Tanh(ad::PairAdd(state_in_(state_in), state_z_(z)));
  // Residual parameterisation: s_hat = s + delta.
  return ad::RepeatCols(states, z.cols()) + state_out_(hidden);
}

void Decoders::Register(const std::string& prefix, nn::ParameterList& params) const {
  reward_in_.Register(prefix + "reward_in.", params);
  reward_z_.Register(prefix + "reward_z.", params);
  reward_out_.Register(prefix + "reward_out.", params);
  state_in_.Register(prefix + "state_in.", params);
  state_z_.Register(prefix + "state_z.", params);
  state_out_.Register(prefix + "state_out.", params);
}

// ---------------------------------------------------------------------------
// Prior

ClusterPrior::ClusterPrior(const CbviConfig& config, Rng& rng) {
  std::normal_distribution<double> n(0.0, config.prior_init_std);
  Matrix m(config.latent_dim, config.num_clusters);
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) m(i, j) = config.prior_init_std > 0.0 ? n(rng) : 0.0;
  mean = Var::Parameter(std::move(m));
  logstd = Var::Parameter(Matrix::Zero(config.latent_dim, config.num_clusters));
  CopyToTarget();
}

void ClusterPrior::CopyToTarget() {
  target_mean = mean.value();
  target_logstd = logstd.value();
}

void ClusterPrior::Register(const std::string& prefix, nn::ParameterList& params) const {
  params.Add(prefix + "mean", mean);
  params.Add(prefix + "logstd", logstd);
}

bool SyncTarget(ClusterPrior& prior, long epoch, int interval) {
  if (interval <= 0 || epoch % interval != 0) return false;
  prior.CopyToTarget();
  return true;
}

// ---------------------------------------------------------------------------
// Objective pieces

Var GaussianKl(const Var& mean_q, const Var& logstd_q, const Var& mean_p, const Var& logstd_p) {
  // log(sp / sq) + (sq^2 + (mq - mp)^2) / (2 sp^2) - 1/2
  Var log_ratio = logstd_p - logstd_q;
  Var var_ratio = ad::Exp(ad::Scale(logstd_q - logstd_p, 2.0));
  Var mahal = ad::Square(mean_q - mean_p) * ad::Exp(ad::Scale(logstd_p, -2.0));
  Var per_dim = log_ratio + ad::AddScalar(ad::Scale(var_ratio + mahal, 0.5), -0.5);
  return ad::SumRows(per_dim);
}

Var CategoricalKl(const Var& log_p, const Var& log_q) {
  return ad::SumRows(ad::Exp(log_p) * (log_p - log_q));
}

Var ClusterKl(const Var& logits) {
  Var log_q = ad::LogSoftmax(logits);
  // KL(q || U) = -H[q] + ln C
  return ad::AddScalar(ad::SumRows(ad::Exp(log_q) * log_q),
                       std::log(static_cast<double>(logits.rows())));
}

Var ExpectedLatentKl(const Encoder& encoder, const Var& h_beta, const Var& logits,
                     const ClusterPrior& prior) {
  const int num_clusters = static_cast<int>(logits.rows());
  const int batch = static_cast<int>(logits.cols());
  Var q = ad::Softmax(logits);
  Var total;
  for (int c = 0; c < num_clusters; ++c) {
    Var onehot = ad::Constant(OneHotColumns(num_clusters, c, batch));
    Var kl = GaussianKl(encoder.ZMean(h_beta, onehot), encoder.ZLogStd(h_beta, onehot),
                        ad::RepeatCols(ad::Cols(prior.mean, c, 1), batch),
                        ad::RepeatCols(ad::Cols(prior.logstd, c, 1), batch));
    Var weighted = ad::Rows(q, c, 1) * kl;
    total = total.defined() ? total + weighted : weighted;
  }
  return total;
}

Var SampleLatentGraph(const Encoder& encoder, const Var& h_beta, const Var& logits,
                      const Matrix& gumbel, const Matrix& eps, double temperature,
                      bool straight_through) {
  Var soft = ad::Softmax(ad::Scale(logits + ad::Constant(gumbel), 1.0 / temperature));
  Var cluster = straight_through ? ad::StraightThroughOneHot(soft) : soft;
  Var mean = encoder.ZMean(h_beta, cluster);
  Var logstd = encoder.ZLogStd(h_beta, cluster);
  return mean + ad::Exp(logstd) * ad::Constant(eps);
}

Var ReconstructionLoss(const Decoders& decoders, const TrialTensors& trial, const Var& z) {
  const Eigen::Index n = trial.length();
  const Eigen::Index count = z.cols();
  Var r_hat = decoders.PredictRewards(ad::Constant(trial.reward_in), z);
  Var r_err = ad::Square(r_hat - ad::Constant(trial.rewards.replicate(1, count)));
  Var loss = ad::BlockColSum(r_err, n);
  if (decoders.lambda_s() > 0.0) {
    Var s_hat = decoders.PredictStates(ad::Constant(trial.state_in), ad::Constant(trial.states), z);
    Var s_err = ad::Square(s_hat - ad::Constant(trial.next_states.replicate(1, count)));
    loss = loss + ad::Scale(ad::SumRows(ad::BlockColSum(s_err, n)), decoders.lambda_s());
  }
  return loss;
}

Var InTrialConsistency(const std::vector<Var>& logits) {
  if (logits.size() < 2) throw std::invalid_argument("InTrialConsistency: need >= 2 posteriors");
  Var total;
  Var prev = ad::LogSoftmax(logits.front());
  for (std::size_t t = 1; t < logits.size(); ++t) {
    Var cur = ad::LogSoftmax(logits[t]);
    Var kl = CategoricalKl(prev, cur);
    total = total.defined() ? total + kl : kl;
    prev = cur;
  }
  return ad::Scale(total, 1.0 / static_cast<double>(logits.size() - 1));
}

Var PriorConsistency(const ClusterPrior& prior) {
  Var kl = GaussianKl(prior.mean, prior.logstd, ad::Constant(prior.target_mean),
                      ad::Constant(prior.target_logstd));
  return ad::Mean(kl);
}

Var ElboAt(const Encoder& encoder, const Encoder::Step& step, const ClusterPrior& prior,
           const Decoders& decoders, const TrialTensors& trial, const Matrix& gumbel,
           const Matrix& eps, double temperature, bool straight_through) {
  Var z = SampleLatentGraph(encoder, step.h_beta, step.logits, gumbel, eps, temperature,
                            straight_through);
  Var recon = ReconstructionLoss(decoders, trial, z);
  Var latent_kl = ExpectedLatentKl(encoder, step.h_beta, step.logits, prior);
  Var cluster_kl = ClusterKl(step.logits);
  return ad::Neg(recon + latent_kl + cluster_kl);
}

CbviLossTerms CbviLoss(const Encoder& encoder, const Decoders& decoders, const ClusterPrior& prior,
                       const std::vector<const Trajectory*>& trials, std::uint64_t noise_seed) {
  if (trials.empty()) throw std::invalid_argument("CbviLoss: empty batch");
  const CbviConfig& cfg = encoder.config();
  const int batch = static_cast<int>(trials.size());
  const int length = static_cast<int>(trials.front()->size());
  for (const auto* t : trials) {
    if (static_cast<int>(t->size()) != length) {
      throw std::invalid_argument("CbviLoss: trials of unequal length");
    }
  }

  std::vector<TrialTensors> data;
  data.reserve(trials.size());
  for (const auto* t : trials) data.push_back(TrialTensors::FromTrajectory(*t, cfg.action_scale));

  // Encode all trials in lockstep; steps[t] summarises tau_:t.
  std::vector<Encoder::Step> steps;
  steps.reserve(static_cast<std::size_t>(length) + 1);
  steps.push_back(encoder.InitialStep(batch));
  Matrix x(kTransitionDim, batch);
  for (int i = 0; i < length; ++i) {
    for (int b = 0; b < batch; ++b) x.col(b) = data[b].features.col(i);
    steps.push_back(encoder.Advance(steps.back(), ad::Constant(x)));
  }

  std::vector<int> elbo_times;
  for (int t = 0; t <= length; t += cfg.elbo_stride) elbo_times.push_back(t);
  const double scale = static_cast<double>(length + 1) / static_cast<double>(elbo_times.size());

  Rng rng(noise_seed);

  // Reconstruction targets, optionally a uniform subset of each trial.
  double decode_scale = 1.0;
  std::vector<TrialTensors> targets;
  if (cfg.decode_subsample > 0 && cfg.decode_subsample < length) {
    const int k = cfg.decode_subsample;
    decode_scale = static_cast<double>(length) / k;
    std::vector<int> index(static_cast<std::size_t>(length));
    for (const auto& d : data) {
      std::iota(index.begin(), index.end(), 0);
      std::shuffle(index.begin(), index.end(), rng);
      std::sort(index.begin(), index.begin() + k);
      TrialTensors sub;
      auto pick = [&](const Matrix& m) {
        Matrix out(m.rows(), k);
        for (int j = 0; j < k; ++j) out.col(j) = m.col(index[j]);
        return out;
      };
      sub.features = pick(d.features);
      sub.reward_in = pick(d.reward_in);
      sub.state_in = pick(d.state_in);
      sub.states = pick(d.states);
      sub.next_states = pick(d.next_states);
      sub.rewards = pick(d.rewards);
      targets.push_back(std::move(sub));
    }
  } else {
    targets = data;
  }

  Var latent_kl_sum;
  Var cluster_kl_sum;
  std::vector<std::vector<Var>> latent_columns(static_cast<std::size_t>(batch));
  for (int t : elbo_times) {
    const auto& s = steps[static_cast<std::size_t>(t)];
    Var ckl = ad::Sum(ClusterKl(s.logits));
    Var zkl = ad::Sum(ExpectedLatentKl(encoder, s.h_beta, s.logits, prior));
    cluster_kl_sum = cluster_kl_sum.defined() ? cluster_kl_sum + ckl : ckl;
    latent_kl_sum = latent_kl_sum.defined() ? latent_kl_sum + zkl : zkl;
    for (int k = 0; k < cfg.mc_samples; ++k) {
      const Matrix gumbel = GumbelNoise(cfg.num_clusters, batch, rng);
      const Matrix eps = NormalNoise(cfg.latent_dim, batch, rng);
      Var z = SampleLatentGraph(encoder, s.h_beta, s.logits, gumbel, eps, cfg.gumbel_temperature,
                                cfg.straight_through);
      for (int b = 0; b < batch; ++b) latent_columns[b].push_back(ad::Cols(z, b, 1));
    }
  }

  Var recon_sum;
  for (int b = 0; b < batch; ++b) {
    Var r = ad::Sum(ReconstructionLoss(decoders, targets[b], ad::HCat(latent_columns[b])));
    recon_sum = recon_sum.defined() ? recon_sum + r : r;
  }

  std::vector<Var> all_logits;
  all_logits.reserve(steps.size());
  for (const auto& s : steps) all_logits.push_back(s.logits);

  const double per_trial = 1.0 / batch;
  CbviLossTerms out;
  out.reconstruction = ad::Scale(recon_sum, decode_scale * scale * per_trial / cfg.mc_samples);
  out.latent_kl = ad::Scale(latent_kl_sum, scale * per_trial);
  out.cluster_kl = ad::Scale(cluster_kl_sum, scale * per_trial);
  out.elbo = ad::Neg(out.reconstruction + out.latent_kl + out.cluster_kl);
  out.in_trial = ad::Scale(ad::Sum(InTrialConsistency(all_logits)), per_trial);
  out.prior_consistency = PriorConsistency(prior);
  out.total = ad::Neg(out.elbo - ad::Scale(out.in_trial, cfg.lambda_i) -
                      ad::Scale(out.prior_consistency, cfg.lambda_p));
  return out;
}

// ---------------------------------------------------------------------------
// Model

CbviModel::CbviModel(const CbviConfig& config, std::uint64_t seed) : config_(config) {
  if (auto errors = config.Validate(); !errors.empty()) {
    throw std::invalid_argument("invalid cbvi config: " + errors.front());
  }
  Rng rng(DeriveSeed(seed, {0xcb71}));
  encoder_ = Encoder(config, rng);
  decoders_ = Decoders(config, rng);
  prior_ = ClusterPrior(config, rng);
  optimizer_ = nn::Adam(Parameters(), nn::AdamConfig{.learning_rate = config.learning_rate});
}

nn::ParameterList CbviModel::Parameters() const {
  nn::ParameterList params;
  encoder_.Register("encoder.", params);
  decoders_.Register("decoder.", params);
  prior_.Register("prior.", params);
  return params;
}

CbviDiagnostics CbviModel::Update(const std::vector<std::shared_ptr<const TrialRecord>>& batch,
                                  std::uint64_t noise_seed) {
  std::vector<const Trajectory*> trials;
  trials.reserve(batch.size());
  for (const auto& r : batch) trials.push_back(&r->transitions);

  optimizer_.ZeroGrad();
  CbviLossTerms terms = CbviLoss(encoder_, decoders_, prior_, trials, noise_seed);
  CbviDiagnostics d;
  d.total = terms.total.item();
  d.elbo = terms.elbo.item();
  d.reconstruction = terms.reconstruction.item();
  d.latent_kl = terms.latent_kl.item();
  d.cluster_kl = terms.cluster_kl.item();
  d.in_trial = terms.in_trial.item();
  d.prior_consistency = terms.prior_consistency.item();
  if (!std::isfinite(d.total)) {
    throw std::runtime_error("CBVI loss is not finite (reconstruction " +
                             std::to_string(d.reconstruction) + ", latent KL " +
                             std::to_string(d.latent_kl) + ")");
  }
  ad::Backward(terms.total);
  d.grad_norm = optimizer_.params().GradNorm();
  optimizer_.Step();
  optimizer_.ZeroGrad();
  ++epoch_;
  SyncTarget(prior_, epoch_, config_.target_sync_interval);
  return d;
}

}  // namespace taskclust::cbvi
