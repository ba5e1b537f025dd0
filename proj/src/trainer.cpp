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


#include "taskclust/trainer.hpp"

#include <filesystem>
#include <stdexcept>

#include "taskclust/checkpoint.hpp"

namespace taskclust {
namespace {

// Stream tags for DeriveSeed.
enum : std::uint64_t {
  kSplitStream = 1,
  kTaskPickStream = 2,
  kTrialStream = 3,
  kPpoStream = 4,
  kStoreStream = 5,
  kCbviNoiseStream = 6,
  kEvalStream = 7,
  kExploreInitStream = 8,
  kExploitInitStream = 9,
};

void Accumulate(std::map<std::string, double>& into, const std::string& prefix,
                const std::map<std::string, double>& values) {
  for (const auto& [k, v] : values) into[prefix + k] += v;
}

}  // namespace

Trainer::Trainer(RunConfig cfg)
    : cfg_(std::move(cfg)),
      fingerprint_(Fingerprint(cfg_)),
      env_(cfg_.env),
      store_(static_cast<std::size_t>(cfg_.train.buffer_capacity),
             static_cast<std::size_t>((cfg_.train.exploit_episodes + 1) * cfg_.env.horizon)) {
  if (auto problems = cfg_.Validate(); !problems.empty()) throw ConfigError(std::move(problems));
  split_ = MakeMetaSplit(cfg_.task, cfg_.train.n_train, cfg_.train.n_test,
                         DeriveSeed(cfg_.seed, {kSplitStream}));
  model_ = std::make_unique<cbvi::CbviModel>(cfg_.cbvi, cfg_.seed);
  const int input = PolicyInputDim(cfg_.cbvi.latent_dim, cfg_.cbvi.num_clusters);
  Rng explore_rng(DeriveSeed(cfg_.seed, {kExploreInitStream}));
  Rng exploit_rng(DeriveSeed(cfg_.seed, {kExploitInitStream}));
  explore_ = ActorCritic(input, cfg_.policy, explore_rng);
  exploit_ = ActorCritic(input, cfg_.policy, exploit_rng);
  explore_opt_ = nn::Adam(explore_.Parameters(), {.learning_rate = cfg_.ppo.learning_rate});
  exploit_opt_ = nn::Adam(exploit_.Parameters(), {.learning_rate = cfg_.ppo.learning_rate});
}

Agent Trainer::agent() const {
  return Agent{&model_->encoder(), &explore_, &exploit_};
}

TrialOptions Trainer::Options(RolloutMode mode) const {
  TrialOptions o;
  o.mode = mode;
  o.exploit_episodes = cfg_.train.exploit_episodes;
  o.exploration_enabled = cfg_.train.exploration_enabled;
  o.schedule = cfg_.Schedule();
  o.gumbel_temperature = cfg_.cbvi.gumbel_temperature;
  o.action_scale = cfg_.policy.action_scale;
  o.chunk = cfg_.train.rollout_chunk;
  o.workers = cfg_.train.rollout_workers;
  return o;
}

IterationStats Trainer::Iterate() {
  const auto it = static_cast<std::uint64_t>(iteration_);
  const int n = cfg_.train.trials_per_iteration;

  // Tasks are drawn uniformly from the training split.
  Rng pick(DeriveSeed(cfg_.seed, {kTaskPickStream, it}));
  std::uniform_int_distribution<int> which(0, static_cast<int>(split_.train.size()) - 1);
  std::vector<TaskSpec> tasks;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n; ++i) {
    tasks.push_back(split_.train[static_cast<std::size_t>(which(pick))]);
    seeds.push_back(DeriveSeed(cfg_.seed, {kTrialStream, it, static_cast<std::uint64_t>(i)}));
  }
  const std::vector<TrialResult> trials =
      RunTrials(tasks, seeds, agent(), env_, Options(RolloutMode::kTrain));

  IterationStats stats;
  const int episodes = cfg_.train.exploit_episodes + 1;
  stats.train_returns.assign(static_cast<std::size_t>(episodes), 0.0);
  RolloutBatch explore_batch;
  RolloutBatch exploit_batch;
  double r_h_sum = 0.0;
  double r_c_sum = 0.0;
  for (const auto& trial : trials) {
    TrialRecord record;
    record.task_id = trial.task.task_id;
    record.cluster_id = trial.task.cluster_id;
    record.transitions = trial.Flatten();
    record.insertion_epoch = iteration_;
    store_.Insert(std::move(record));
    for (int e = 0; e < episodes; ++e) {
      const EpisodeRecord& ep = trial.episodes[static_cast<std::size_t>(e)];
      stats.train_returns[e] += ep.env_return / n;
      if (ep.exploration) {
        explore_batch.Append(ep.samples);
        for (double v : ep.r_h) r_h_sum += v;
        for (double v : ep.r_c) r_c_sum += v;
      } else {
        exploit_batch.Append(ep.samples);
      }
    }
  }
  stats.losses["intrinsic/r_h"] = r_h_sum / n;
  stats.losses["intrinsic/r_c"] = r_c_sum / n;

  Rng ppo_rng(DeriveSeed(cfg_.seed, {kPpoStream, it}));
  auto update = [&](RolloutBatch& batch, ActorCritic& net, nn::Adam& opt,
                    RunningMoments& moments, const std::string& prefix) {
    if (batch.empty()) return;
    if (cfg_.ppo.normalize_returns) NormalizeRewards(batch, cfg_.ppo.gamma, moments);
    ComputeAdvantages(batch, cfg_.ppo.gamma, cfg_.ppo.gae_lambda);
    const PpoDiagnostics d = PpoUpdate(net, opt, batch, cfg_.ppo, ppo_rng);
    net.mutable_normalizer().Update(batch.raw_features);
    Accumulate(stats.losses, prefix,
               {{"policy", d.policy_loss},
                {"value", d.value_loss},
                {"entropy", d.entropy},
                {"approx_kl", d.approx_kl},
                {"clip_fraction", d.clip_fraction}});
  };
  update(explore_batch, explore_, explore_opt_, explore_moments_, "explore/");
  update(exploit_batch, exploit_, exploit_opt_, exploit_moments_, "exploit/");

  const int updates = cfg_.cbvi.updates_per_iteration;
  for (int k = 0; k < updates; ++k) {
    const auto kk = static_cast<std::uint64_t>(k);
    auto batch = store_.SampleBatch(static_cast<std::size_t>(cfg_.cbvi.batch_trials),
                                    DeriveSeed(cfg_.seed, {kStoreStream, it, kk}));
    const cbvi::CbviDiagnostics d =
        model_->Update(batch, DeriveSeed(cfg_.seed, {kCbviNoiseStream, it, kk}));
    Accumulate(stats.losses, "cbvi/",
               {{"total", d.total / updates},
                {"elbo", d.elbo / updates},
                {"reconstruction", d.reconstruction / updates},
                {"latent_kl", d.latent_kl / updates},
                {"cluster_kl", d.cluster_kl / updates},
                {"in_trial", d.in_trial / updates},
                {"prior_consistency", d.prior_consistency / updates}});
  }

  frames_ += static_cast<long>(n) * episodes * cfg_.env.horizon;
  ++iteration_;
  return stats;
}

EvalReport Trainer::EvaluateTest() const {
  EvalReport r = Evaluate(agent(), split_.test, env_, Options(RolloutMode::kTest),
                          DeriveSeed(cfg_.seed, {kEvalStream}));
  r.fingerprint = fingerprint_;
  r.iteration = iteration_;
  return r;
}

std::string Trainer::OutputPath(const std::string& name) const {
  return (std::filesystem::path(cfg_.output_dir) / name).string();
}

EvalReport Trainer::Run(const std::function<void(const MetricRecord&)>& on_record) {
  std::filesystem::create_directories(cfg_.output_dir);
  SaveRunConfig(cfg_, OutputPath("config.json"));
  MetricsWriter writer(OutputPath("metrics.jsonl"), iteration_ == 0);

  std::vector<double> train_sum;
  std::map<std::string, double> loss_sum;
  int since = 0;
  auto emit = [&](const EvalReport& report) {
    MetricRecord rec;
    rec.iteration = iteration_;
    rec.frames = frames_;
    rec.test_returns = report.mean_returns;
    rec.nmi = report.nmi_final;
    rec.nmi_mean = report.nmi_mean;
    rec.fingerprint = fingerprint_;
    for (double v : train_sum) rec.train_returns.push_back(since ? v / since : 0.0);
    for (const auto& [k, v] : loss_sum) rec.losses[k] = since ? v / since : 0.0;
    writer.Write(rec);
    if (on_record) on_record(rec);
    train_sum.clear();
    loss_sum.clear();
    since = 0;
  };

  EvalReport report = EvaluateTest();
  if (iteration_ == 0) emit(report);
  while (iteration_ < cfg_.train.iterations) {
    IterationStats stats = Iterate();
    train_sum.resize(stats.train_returns.size(), 0.0);
    for (std::size_t e = 0; e < stats.train_returns.size(); ++e) {
      train_sum[e] += stats.train_returns[e];
    }
    for (const auto& [k, v] : stats.losses) loss_sum[k] += v;
    ++since;
    const bool last = iteration_ == cfg_.train.iterations;
    if (iteration_ % cfg_.train.eval_interval == 0 || last) {
      report = EvaluateTest();
      emit(report);
    }
    if (!last && cfg_.train.checkpoint_interval > 0 &&
        iteration_ % cfg_.train.checkpoint_interval == 0) {
      SaveCheckpoint(OutputPath("checkpoint_" + std::to_string(iteration_) + ".json"));
    }
  }
  SaveCheckpoint(OutputPath("checkpoint.json"));
  WriteJsonFile(OutputPath("eval_report.json"), ToJson(report));
  return report;
}

nn::ParameterList Trainer::AllParameters() const {
  nn::ParameterList params;
  params.Append("cbvi.", model_->Parameters());
  params.Append("explore.", explore_.Parameters());
  params.Append("exploit.", exploit_.Parameters());
  return params;
}

void Trainer::SaveCheckpoint(const std::string& path) const {
  nlohmann::json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["fingerprint"] = fingerprint_;
  j["config"] = ToJson(cfg_);
  // Like the fingerprint, the checkpoint does not depend on where it lives.
  j["config"].erase("output_dir");
  j["iteration"] = iteration_;
  j["frames"] = frames_;
  j["cbvi_epoch"] = model_->epoch();
  j["parameters"] = ParametersToJson(AllParameters());
  j["prior_target"] = {{"mean", MatrixToJson(model_->prior().target_mean)},
                       {"logstd", MatrixToJson(model_->prior().target_logstd)}};
  j["optimizers"] = {{"cbvi", AdamToJson(model_->optimizer())},
                     {"explore", AdamToJson(explore_opt_)},
                     {"exploit", AdamToJson(exploit_opt_)}};
  j["return_moments"] = {{"explore", MomentsToJson(explore_moments_)},
                         {"exploit", MomentsToJson(exploit_moments_)}};
  j["input_normalizers"] = {{"explore", NormalizerToJson(explore_.normalizer())},
                            {"exploit", NormalizerToJson(exploit_.normalizer())}};
  WriteJsonFile(path, j);
}

void Trainer::LoadCheckpoint(const std::string& path, bool allow_mismatch) {
  const nlohmann::json j = ReadJsonFile(path);
  try {
    if (j.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw std::runtime_error("unsupported checkpoint format version");
    }
    const std::string fp = j.at("fingerprint").get<std::string>();
    if (fp != fingerprint_ && !allow_mismatch) {
      throw std::runtime_error("checkpoint fingerprint " + fp + " does not match config " +
                               fingerprint_);
    }
    ParametersFromJson(j.at("parameters"), AllParameters());
    model_->mutable_prior().target_mean = MatrixFromJson(j.at("prior_target").at("mean"));
    model_->mutable_prior().target_logstd = MatrixFromJson(j.at("prior_target").at("logstd"));
    AdamFromJson(j.at("optimizers").at("cbvi"), model_->optimizer());
    AdamFromJson(j.at("optimizers").at("explore"), explore_opt_);
    AdamFromJson(j.at("optimizers").at("exploit"), exploit_opt_);
    explore_moments_ = MomentsFromJson(j.at("return_moments").at("explore"));
    exploit_moments_ = MomentsFromJson(j.at("return_moments").at("exploit"));
    NormalizerFromJson(j.at("input_normalizers").at("explore"), explore_.mutable_normalizer());
    NormalizerFromJson(j.at("input_normalizers").at("exploit"), exploit_.mutable_normalizer());
    model_->set_epoch(j.at("cbvi_epoch").get<long>());
    iteration_ = j.at("iteration").get<long>();
    frames_ = j.at("frames").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed checkpoint (" + e.what() + ")");
  }
}

TrainOutcome MetaTrain(const RunConfig& cfg,
                       const std::function<void(const MetricRecord&)>& on_record) {
  Trainer trainer(cfg);
  TrainOutcome out;
  out.final_report = trainer.Run(on_record);
  out.checkpoint_path = trainer.OutputPath("checkpoint.json");
  out.metrics_path = trainer.OutputPath("metrics.jsonl");
  return out;
}

}  // namespace taskclust
