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


#include "taskclust/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace taskclust {

std::vector<int> EpisodeRecord::InferredClusters() const {
  std::vector<int> out;
  for (Eigen::Index t = 1; t < cluster_probs.cols(); ++t) {
    Eigen::Index c = 0;
    cluster_probs.col(t).maxCoeff(&c);
    out.push_back(static_cast<int>(c));
  }
  return out;
}

Trajectory TrialResult::Flatten() const {
  Trajectory out;
  for (const auto& e : episodes) out.insert(out.end(), e.transitions.begin(), e.transitions.end());
  return out;
}

std::vector<double> TrialResult::Returns() const {
  std::vector<double> out;
  for (const auto& e : episodes) out.push_back(e.env_return);
  return out;
}

cbvi::PosteriorState PosteriorColumn(const cbvi::PosteriorState& ps, int b) {
  cbvi::PosteriorState out;
  out.h_alpha = ps.h_alpha.col(b);
  out.h_beta = ps.h_beta.col(b);
  out.cluster_logits = ps.cluster_logits.col(b);
  for (const auto& m : ps.z_mean) out.z_mean.push_back(m.col(b));
  for (const auto& m : ps.z_logstd) out.z_logstd.push_back(m.col(b));
  return out;
}

namespace {

// Lockstep simulation of a group of trials.
void RunGroup(const std::vector<TaskSpec>& tasks, const std::vector<std::uint64_t>& seeds,
              const Agent& agent, const PointRobotEnv& env, const TrialOptions& opt,
              std::vector<TrialResult>& out) {
  ad::NoGradGuard no_grad;
  const int batch = static_cast<int>(tasks.size());
  const int horizon = env.config().horizon;
  const int num_clusters = agent.encoder->config().num_clusters;
  const int latent_dim = agent.encoder->config().latent_dim;
  const bool train = opt.mode == RolloutMode::kTrain;

  std::vector<Rng> rngs;
  for (auto s : seeds) rngs.emplace_back(s);
  std::normal_distribution<double> normal(0.0, 1.0);

  out.assign(static_cast<std::size_t>(batch), TrialResult{});
  for (int b = 0; b < batch; ++b) out[b].task = tasks[b];

  cbvi::PosteriorState ps = agent.encoder->InitialState(batch);
  const int num_episodes = opt.exploit_episodes + 1;
  for (int e = 0; e < num_episodes; ++e) {
    const bool exploring = e == 0 && opt.exploration_enabled;
    const ActorCritic& net = exploring ? *agent.explore : *agent.exploit;
    if (e == 1) {
      for (int b = 0; b < batch; ++b) out[b].exploitation_initial = PosteriorColumn(ps, b);
    }

    std::vector<EnvState> states;
    for (int b = 0; b < batch; ++b) states.push_back(env.Reset(tasks[b]));
    std::vector<EpisodeRecord> records(static_cast<std::size_t>(batch));
    const int feat_dim = net.input_dim();
    for (auto& r : records) {
      r.exploration = exploring;
      r.cluster_probs.resize(num_clusters, horizon + 1);
      r.samples.features.resize(feat_dim, horizon);
      r.samples.raw_features.resize(feat_dim, horizon);
      r.samples.raw_actions.resize(kActionDim, horizon);
    }

    Matrix q_before = ps.ClusterProbs();
    for (int t = 0; t < horizon; ++t) {
      Matrix one_hot(num_clusters, batch);
      Matrix eps(latent_dim, batch);
      for (int b = 0; b < batch; ++b) {
        one_hot.col(b) = cbvi::SampleCluster(
            ps.cluster_logits.col(b), opt.gumbel_temperature,
            train ? cbvi::ClusterSampling::kGumbel : cbvi::ClusterSampling::kArgmax, rngs[b]);
        for (int i = 0; i < latent_dim; ++i) eps(i, b) = normal(rngs[b]);
      }
      const Matrix z = cbvi::SampleLatent(ps, one_hot, eps);

      Matrix raw_features(feat_dim, batch);
      for (int b = 0; b < batch; ++b) {
        raw_features.col(b) =
            PolicyFeatures(states[b].position, z.col(b), q_before.col(b), t, horizon);
      }
      const Matrix features = net.Normalize(raw_features);
      Var x = ad::Constant(features);
      const Matrix mean = net.Mean(x).value();
      const Matrix value = net.Value(x).value();
      const Eigen::VectorXd log_std = net.LogStd().value().col(0);
      Matrix raw = mean;
      if (train) {
        for (int b = 0; b < batch; ++b) {
          for (int i = 0; i < kActionDim; ++i) raw(i, b) += std::exp(log_std[i]) * normal(rngs[b]);
        }
      }
      const Matrix log_prob = net.LogProb(ad::Constant(mean), raw).value();

      Matrix x_enc(kTransitionDim, batch);
      for (int b = 0; b < batch; ++b) {
        const Vec2 action = opt.action_scale * raw.col(b);
        const StepResult step = env.Step(tasks[b], states[b], action);
        Transition tr;
        tr.state = states[b].position;
        tr.action = env.ClipAction(action);
        tr.reward = step.reward;
        tr.next_state = step.next_state.position;
        x_enc.col(b) = cbvi::TransitionFeatures(tr, opt.action_scale);
        records[b].transitions.push_back(tr);
        states[b] = step.next_state;
      }

      ps = agent.encoder->EncodeStep(ps, x_enc);
      const Matrix q_after = ps.ClusterProbs();
      for (int b = 0; b < batch; ++b) {
        EpisodeRecord& rec = records[b];
        const Transition& tr = rec.transitions.back();
        const double r_h = RewardEntropyReduction(q_before.col(b), q_after.col(b));
        const double r_c = RewardConsistency(q_before.col(b), q_after.col(b));
        const double shaped =
            exploring ? ComposeExplorationReward(tr.reward, r_h, r_c, t, opt.schedule) : tr.reward;
        Eigen::Index c = 0;
        one_hot.col(b).maxCoeff(&c);
        rec.cluster_probs.col(t) = q_before.col(b);
        rec.r_h.push_back(r_h);
        rec.r_c.push_back(r_c);
        rec.shaped_rewards.push_back(shaped);
        rec.chosen_clusters.push_back(static_cast<int>(c));
        rec.env_return += tr.reward;

        RolloutBatch& s = rec.samples;
        s.features.col(t) = features.col(b);
        s.raw_features.col(t) = raw_features.col(b);
        s.raw_actions.col(t) = raw.col(b);
        s.log_probs.push_back(log_prob(0, b));
        s.values.push_back(value(0, b));
        s.env_rewards.push_back(tr.reward);
        s.rewards.push_back(shaped);
        s.episode_index.push_back(e);
        s.trial_id.push_back(tasks[b].task_id);
        s.episode_end.push_back(t == horizon - 1);
      }
      q_before = q_after;
    }
    for (int b = 0; b < batch; ++b) {
      records[b].cluster_probs.col(horizon) = q_before.col(b);
      out[b].episodes.push_back(std::move(records[b]));
    }
    if (e == 0) {
      for (int b = 0; b < batch; ++b) out[b].exploration_final = PosteriorColumn(ps, b);
    }
  }
}

}  // namespace

std::vector<TrialResult> RunTrials(const std::vector<TaskSpec>& tasks,
                                   const std::vector<std::uint64_t>& seeds, const Agent& agent,
                                   const PointRobotEnv& env, const TrialOptions& options) {
  if (tasks.size() != seeds.size()) throw std::invalid_argument("RunTrials: one seed per task");
  if (!agent.encoder || !agent.exploit || (options.exploration_enabled && !agent.explore)) {
    throw std::invalid_argument("RunTrials: agent is missing a network");
  }
  if (options.exploit_episodes < 1) throw std::invalid_argument("RunTrials: need N >= 1");
  const int chunk = std::max(1, options.chunk);
  const int n = static_cast<int>(tasks.size());
  const int num_groups = (n + chunk - 1) / chunk;

  std::vector<std::vector<TrialResult>> groups(static_cast<std::size_t>(num_groups));
  auto run = [&](int g) {
    const int lo = g * chunk;
    const int hi = std::min(n, lo + chunk);
    std::vector<TaskSpec> t(tasks.begin() + lo, tasks.begin() + hi);
    std::vector<std::uint64_t> s(seeds.begin() + lo, seeds.begin() + hi);
    RunGroup(t, s, agent, env, options, groups[g]);
  };

  const int hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min({std::max(1, options.workers), num_groups, hw});
  if (workers <= 1) {
    for (int g = 0; g < num_groups; ++g) run(g);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int g = next++; g < num_groups; g = next++) {
          try {
            run(g);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  std::vector<TrialResult> out;
  out.reserve(tasks.size());
  for (auto& g : groups) {
    for (auto& r : g) out.push_back(std::move(r));
  }
  return out;
}

TrialResult RunTrial(const TaskSpec& task, std::uint64_t seed, const Agent& agent,
                     const PointRobotEnv& env, const TrialOptions& options) {
  return std::move(RunTrials({task}, {seed}, agent, env, options).front());
}

}  // namespace taskclust
