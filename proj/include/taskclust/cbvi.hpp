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

#ifndef TASKCLUST_CBVI_HPP_
#define TASKCLUST_CBVI_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "taskclust/autodiff.hpp"
#include "taskclust/environments.hpp"
#include "taskclust/nn.hpp"
#include "taskclust/random.hpp"
#include "taskclust/trajectory_store.hpp"

// Cluster-based variational inference.
//
// The encoder keeps two recurrent states per trial: h_alpha summarises the
// history at cluster granularity and alone determines q(c | tau_:t); h_beta
// is driven by the transition and h_alpha and, together with a cluster
// one-hot, parameterises the diagonal Gaussian q(z | c, tau_:t). Each cluster
// owns a learnable Gaussian prior p(z | c) that is regularised towards a
// slowly refreshed target copy. Decoders reconstruct rewards (and optionally
// next states) of the whole trial from a latent sample.
namespace taskclust::cbvi {

using ad::Matrix;
using ad::Var;

struct CbviConfig {
  int num_clusters = 4;
  int latent_dim = 8;
  int embed_dim = 32;
  int cluster_hidden = 64;
  int task_hidden = 64;
  // false: one GRU feeds both heads (h_beta == h_alpha).
  bool stacked = true;
  int decoder_hidden = 64;
  double lambda_s = 0.0;
  double lambda_i = 1.0;
  double lambda_p = 0.1;
  double gumbel_temperature = 1.0;
  bool straight_through = true;
  // ELBO_t is evaluated at t = 0, stride, 2 * stride, ... and rescaled.
  int elbo_stride = 4;
  int mc_samples = 1;
  // Decode a random subset of this many transitions per trial and rescale
  // (0 decodes the whole trial).
  int decode_subsample = 50;
  double learning_rate = 1e-3;
  int target_sync_interval = 50;
  int batch_trials = 16;
  int updates_per_iteration = 3;
  double prior_init_std = 0.1;
  // Actions are divided by this before entering the networks.
  double action_scale = 0.1;

  std::vector<std::string> Validate() const;
};

// Network inputs for one transition: (s, a / action_scale, r, s').
Eigen::VectorXd TransitionFeatures(const Transition& tr, double action_scale);

// Batched posterior snapshot: one column per trial.
struct PosteriorState {
  Matrix h_alpha;         // cluster_hidden x B
  Matrix h_beta;          // task_hidden x B (equals h_alpha when not stacked)
  Matrix cluster_logits;  // C x B
  std::vector<Matrix> z_mean;    // C entries of d_z x B
  std::vector<Matrix> z_logstd;  // C entries of d_z x B

  int batch() const { return static_cast<int>(cluster_logits.cols()); }
  int num_clusters() const { return static_cast<int>(cluster_logits.rows()); }
  Eigen::VectorXd ClusterProbs(int b) const;
  Matrix ClusterProbs() const;
};

enum class ClusterSampling { kGumbel, kArgmax };

// One-hot cluster choice per column. kGumbel perturbs the logits with
// Gumbel noise and takes the hard argmax of the tempered softmax, the
// forward value of the straight-through estimator; kArgmax picks the most
// probable cluster, lowest index on ties.
Matrix SampleCluster(const Matrix& logits, double temperature, ClusterSampling mode, Rng& rng);

// z = mean_c + exp(logstd_c) * eps for the cluster selected by each column
// of `one_hot`; eps is d_z x B standard normal noise.
Matrix SampleLatent(const PosteriorState& ps, const Matrix& one_hot, const Matrix& eps);

class Encoder {
 public:
  Encoder() = default;
  Encoder(const CbviConfig& config, Rng& rng);

  // Recurrent state and heads of one encoder step, as graph values.
  struct Step {
    Var h_alpha;
    Var h_beta;
    Var logits;
  };

  Step InitialStep(int batch) const;
  // x: kTransitionDim x B transition features.
  Step Advance(const Step& prev, const Var& x) const;
  Var ZMean(const Var& h_beta, const Var& cluster) const;
  Var ZLogStd(const Var& h_beta, const Var& cluster) const;

  // Inference without graph recording.
  PosteriorState InitialState(int batch) const;
  PosteriorState EncodeStep(const PosteriorState& ps, const Matrix& x) const;

  const CbviConfig& config() const { return config_; }
  void Register(const std::string& prefix, nn::ParameterList& params) const;

 private:
  PosteriorState Snapshot(const Step& step) const;

  CbviConfig config_;
  nn::Linear embed_;
  nn::GruCell cluster_gru_;
  nn::GruCell task_gru_;
  nn::Linear cluster_head_;
  nn::Linear z_mean_head_;
  nn::Linear z_logstd_head_;
};

// Column-major data of one trial, N = (N_exploit + 1) * H transitions.
struct TrialTensors {
  Matrix features;     // kTransitionDim x N
  Matrix reward_in;    // (s, a, s') 6 x N
  Matrix state_in;     // (s, a) 4 x N
  Matrix states;       // 2 x N
  Matrix next_states;  // 2 x N
  Matrix rewards;      // 1 x N

  static TrialTensors FromTrajectory(const Trajectory& traj, double action_scale);
  int length() const { return static_cast<int>(rewards.cols()); }
};

class Decoders {
 public:
  Decoders() = default;
  Decoders(const CbviConfig& config, Rng& rng);

  // Predictions for every (transition i, latent t) pair, column t * N + i.
  Var PredictRewards(const Var& reward_in, const Var& z) const;
  Var PredictStates(const Var& state_in, const Var& states, const Var& z) const;

  double lambda_s() const { return lambda_s_; }
  void set_lambda_s(double v) { lambda_s_ = v; }
  void Register(const std::string& prefix, nn::ParameterList& params) const;

 private:
  double lambda_s_ = 0.0;
  nn::Linear reward_in_;
  nn::Linear reward_z_;
  nn::Linear reward_out_;
  nn::Linear state_in_;
  nn::Linear state_z_;
  nn::Linear state_out_;
};

struct ClusterPrior {
  Var mean;    // d_z x C
  Var logstd;  // d_z x C
  Matrix target_mean;
  Matrix target_logstd;

  ClusterPrior() = default;
  ClusterPrior(const CbviConfig& config, Rng& rng);

  void CopyToTarget();
  void Register(const std::string& prefix, nn::ParameterList& params) const;
};

// Copies prior into target when epoch is a multiple of `interval` (epoch 0
// included); returns whether a copy happened.
bool SyncTarget(ClusterPrior& prior, long epoch, int interval);

// Closed-form KL between diagonal Gaussians, summed over rows: 1 x B.
Var GaussianKl(const Var& mean_q, const Var& logstd_q, const Var& mean_p, const Var& logstd_p);
// KL(p || q) from log-probabilities, column-wise: 1 x B.
Var CategoricalKl(const Var& log_p, const Var& log_q);
// KL(q || uniform over C) from logits: 1 x B.
Var ClusterKl(const Var& logits);

// E_{q(c)}[KL(q(z | c) || p(z | c))]: 1 x B.
Var ExpectedLatentKl(const Encoder& encoder, const Var& h_beta, const Var& logits,
                     const ClusterPrior& prior);

// Relaxed (or straight-through) Gumbel-softmax cluster sample followed by a
// reparameterised latent sample; gumbel is C x B, eps is d_z x B.
Var SampleLatentGraph(const Encoder& encoder, const Var& h_beta, const Var& logits,
                      const Matrix& gumbel, const Matrix& eps, double temperature,
                      bool straight_through);

// Sum over the trial of (r - r_hat)^2 + lambda_s ||s' - s_hat||^2 for each
// latent column of z (d_z x T): 1 x T.
Var ReconstructionLoss(const Decoders& decoders, const TrialTensors& trial, const Var& z);

// Mean KL between consecutive cluster posteriors of a sequence of logits
// (each C x B): 1 x B. Requires at least two entries.
Var InTrialConsistency(const std::vector<Var>& logits);

// (1 / C) sum_c KL(p(z | c) || p_tgt(z | c)): 1 x 1.
Var PriorConsistency(const ClusterPrior& prior);

// Single-trial, single-sample ELBO at one encoder step (B = 1).
Var ElboAt(const Encoder& encoder, const Encoder::Step& step, const ClusterPrior& prior,
           const Decoders& decoders, const TrialTensors& trial, const Matrix& gumbel,
           const Matrix& eps, double temperature, bool straight_through);

struct CbviLossTerms {
  // All terms are per-trial means; total is the minimised objective.
  Var total;
  Var elbo;
  Var reconstruction;
  Var latent_kl;
  Var cluster_kl;
  Var in_trial;
  Var prior_consistency;
};

// Negative of mean_trials[ sum_t ELBO_t - lambda_i L_I - lambda_p L_P ].
// All noise is drawn from `noise_seed`, so the loss is a deterministic
// function of the parameters for a fixed seed.
CbviLossTerms CbviLoss(const Encoder& encoder, const Decoders& decoders, const ClusterPrior& prior,
                       const std::vector<const Trajectory*>& trials, std::uint64_t noise_seed);

struct CbviDiagnostics {
  double total = 0.0;
  double elbo = 0.0;
  double reconstruction = 0.0;
  double latent_kl = 0.0;
  double cluster_kl = 0.0;
  double in_trial = 0.0;
  double prior_consistency = 0.0;
  double grad_norm = 0.0;
};

// Encoder, decoders, cluster prior and their optimiser.
class CbviModel {
 public:
  CbviModel(const CbviConfig& config, std::uint64_t seed);
  CbviModel(const CbviModel&) = delete;
  CbviModel& operator=(const CbviModel&) = delete;

  const CbviConfig& config() const { return config_; }
  CbviConfig& mutable_config() { return config_; }
  const Encoder& encoder() const { return encoder_; }
  const Decoders& decoders() const { return decoders_; }
  const ClusterPrior& prior() const { return prior_; }
  ClusterPrior& mutable_prior() { return prior_; }
  nn::ParameterList Parameters() const;
  nn::Adam& optimizer() { return optimizer_; }
  const nn::Adam& optimizer() const { return optimizer_; }

  // One gradient step on a batch; increments the epoch and syncs the target
  // on the configured cadence.
  CbviDiagnostics Update(const std::vector<std::shared_ptr<const TrialRecord>>& batch,
                         std::uint64_t noise_seed);

  long epoch() const { return epoch_; }
  void set_epoch(long e) { epoch_ = e; }

 private:
  CbviConfig config_;
  Encoder encoder_;
  Decoders decoders_;
  ClusterPrior prior_;
  nn::Adam optimizer_;
  long epoch_ = 0;
};

}  // namespace taskclust::cbvi

#endif  // TASKCLUST_CBVI_HPP_
