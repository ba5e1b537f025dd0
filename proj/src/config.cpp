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


#include "taskclust/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace taskclust {

using nlohmann::json;

std::vector<std::string> TrainConfig::Validate() const {
  std::vector<std::string> errors;
  if (iterations < 0) errors.push_back("train.iterations: must be >= 0");
  if (trials_per_iteration < 1) errors.push_back("train.trials_per_iteration: must be >= 1");
  if (exploit_episodes < 1) errors.push_back("train.exploit_episodes: must be >= 1");
  if (n_train < 1) errors.push_back("train.n_train: must be >= 1");
  if (n_test < 2) errors.push_back("train.n_test: must be >= 2");
  if (buffer_capacity < 1) errors.push_back("train.buffer_capacity: must be >= 1");
  if (eval_interval < 1) errors.push_back("train.eval_interval: must be >= 1");
  if (checkpoint_interval < 0) errors.push_back("train.checkpoint_interval: must be >= 0");
  if (rollout_workers < 1) errors.push_back("train.rollout_workers: must be >= 1");
  if (rollout_chunk < 1) errors.push_back("train.rollout_chunk: must be >= 1");
  return errors;
}

std::vector<std::string> RunConfig::Validate() const {
  std::vector<std::string> errors;
  if (schema_version != kConfigSchemaVersion) {
    errors.push_back("schema_version: expected " + std::to_string(kConfigSchemaVersion));
  }
  if (output_dir.empty()) errors.push_back("output_dir: must not be empty");
  auto add = [&](const std::vector<std::string>& more) {
    errors.insert(errors.end(), more.begin(), more.end());
  };
  // The mixture is stored under "task".
  for (std::string m : task.Validate()) {
    if (m.rfind("mixture.", 0) == 0) m = "task." + m.substr(8);
    errors.push_back(std::move(m));
  }
  add(env.Validate());
  add(cbvi.Validate());
  add(policy.Validate());
  add(ppo.Validate());
  add(train.Validate());
  if (!(intrinsic.s_h >= 0.0)) errors.push_back("intrinsic.s_h: must be nonnegative");
  if (!(intrinsic.s_c >= 0.0)) errors.push_back("intrinsic.s_c: must be nonnegative");
  if (train.buffer_capacity < cbvi.batch_trials) {
    errors.push_back("train.buffer_capacity: smaller than cbvi.batch_trials");
  }
  return errors;
}

DecaySchedule RunConfig::Schedule() const {
  DecaySchedule s = intrinsic;
  s.horizon = env.horizon;
  return s;
}

namespace {

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += "\n  " + s;
  return out;
}

// Reads typed fields from one JSON object and remembers which keys were
// consumed, so that leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<std::string>& problems)
      : j_(j), path_(std::move(path)), problems_(problems) {
    if (!j_.is_object()) problems_.push_back(Name("") + ": expected an object");
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      const json& v = j_.at(key);
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      problems_.push_back(Name(key) + ": " + e.what());
    }
  }

  const json* Child(const std::string& key) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  void Finish() {
    if (!j_.is_object()) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) problems_.push_back(Name(key) + ": unknown key");
    }
  }

  std::string Name(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
};

std::string DenseNormName(DenseNorm n) { return n == DenseNorm::kL1 ? "l1" : "l2"; }

json Vec2Json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration:" + Join(problems)),
      problems_(std::move(problems)) {}

json ToJson(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["variant"] = c.variant;
  j["task"] = {{"num_clusters", c.task.num_clusters},
               {"weights", c.task.weights},
               {"family", ToString(c.task.family)},
               {"angle_means", c.task.angle_means},
               {"angle_stds", c.task.angle_stds},
               {"radius", c.task.radius},
               {"sparse_threshold", c.task.sparse_threshold},
               {"param_sets", c.task.param_sets},
               {"multiplier_mean", c.task.multiplier_mean},
               {"multiplier_std", c.task.multiplier_std}};
  j["env"] = {{"horizon", c.env.horizon},
              {"action_limit", c.env.action_limit},
              {"control_cost", c.env.control_cost},
              {"dense_norm", DenseNormName(c.env.dense_norm)},
              {"dynamics_goal", Vec2Json(c.env.dynamics_goal)},
              {"rotation_unit", c.env.rotation_unit},
              {"drift_unit", c.env.drift_unit},
              {"noise_unit", c.env.noise_unit}};
  const auto& v = c.cbvi;
  j["cbvi"] = {{"num_clusters", v.num_clusters},
               {"latent_dim", v.latent_dim},
               {"embed_dim", v.embed_dim},
               {"cluster_hidden", v.cluster_hidden},
               {"task_hidden", v.task_hidden},
               {"stacked", v.stacked},
               {"decoder_hidden", v.decoder_hidden},
               {"lambda_s", v.lambda_s},
               {"lambda_i", v.lambda_i},
               {"lambda_p", v.lambda_p},
               {"gumbel_temperature", v.gumbel_temperature},
               {"straight_through", v.straight_through},
               {"elbo_stride", v.elbo_stride},
               {"mc_samples", v.mc_samples},
               {"decode_subsample", v.decode_subsample},
               {"learning_rate", v.learning_rate},
               {"target_sync_interval", v.target_sync_interval},
               {"batch_trials", v.batch_trials},
               {"updates_per_iteration", v.updates_per_iteration},
               {"prior_init_std", v.prior_init_std},
               {"action_scale", v.action_scale}};
  const auto& s = c.intrinsic;
  j["intrinsic"] = {{"a_h", s.a_h},
                    {"b_h", s.b_h},
                    {"s_h", s.s_h},
                    {"a_c", s.a_c},
                    {"b_c", s.b_c},
                    {"s_c", s.s_c},
                    {"entropy_enabled", s.entropy_enabled},
                    {"consistency_enabled", s.consistency_enabled}};
  j["policy"] = {{"hidden", c.policy.hidden},
                 {"init_log_std", c.policy.init_log_std},
                 {"min_log_std", c.policy.min_log_std},
                 {"max_log_std", c.policy.max_log_std},
                 {"action_scale", c.policy.action_scale},
                 {"normalize_inputs", c.policy.normalize_inputs},
                 {"input_clip", c.policy.input_clip}};
  const auto& p = c.ppo;
  j["ppo"] = {{"learning_rate", p.learning_rate},
              {"clip", p.clip},
              {"value_coef", p.value_coef},
              {"entropy_coef", p.entropy_coef},
              {"huber_delta", p.huber_delta},
              {"gamma", p.gamma},
              {"gae_lambda", p.gae_lambda},
              {"epochs", p.epochs},
              {"minibatch", p.minibatch},
              {"max_grad_norm", p.max_grad_norm},
              {"normalize_returns", p.normalize_returns},
              {"normalize_advantages", p.normalize_advantages}};
  const auto& t = c.train;
  j["train"] = {{"iterations", t.iterations},
                {"trials_per_iteration", t.trials_per_iteration},
                {"exploit_episodes", t.exploit_episodes},
                {"n_train", t.n_train},
                {"n_test", t.n_test},
                {"buffer_capacity", t.buffer_capacity},
                {"eval_interval", t.eval_interval},
                {"checkpoint_interval", t.checkpoint_interval},
                {"rollout_workers", t.rollout_workers},
                {"rollout_chunk", t.rollout_chunk},
                {"exploration_enabled", t.exploration_enabled}};
  return j;
}

RunConfig RunConfigFromJson(const json& j) {
  RunConfig c;
  std::vector<std::string> problems;
  ObjectReader root(j, "", problems);
  root.Read("schema_version", c.schema_version);
  root.Read("seed", c.seed);
  root.Read("output_dir", c.output_dir);
  root.Read("variant", c.variant);

  if (const json* node = root.Child("task")) {
    ObjectReader r(*node, "task", problems);
    r.Read("num_clusters", c.task.num_clusters);
    r.Read("weights", c.task.weights);
    std::string family = ToString(c.task.family);
    r.Read("family", family);
    try {
      c.task.family = TaskFamilyFromString(family);
    } catch (const std::exception& e) {
      problems.push_back(std::string("task.family: ") + e.what());
    }
    r.Read("angle_means", c.task.angle_means);
    r.Read("angle_stds", c.task.angle_stds);
    r.Read("radius", c.task.radius);
    r.Read("sparse_threshold", c.task.sparse_threshold);
    r.Read("param_sets", c.task.param_sets);
    r.Read("multiplier_mean", c.task.multiplier_mean);
    r.Read("multiplier_std", c.task.multiplier_std);
    r.Finish();
  }
  if (const json* node = root.Child("env")) {
    ObjectReader r(*node, "env", problems);
    r.Read("horizon", c.env.horizon);
    r.Read("action_limit", c.env.action_limit);
    r.Read("control_cost", c.env.control_cost);
    std::string norm = DenseNormName(c.env.dense_norm);
    r.Read("dense_norm", norm);
    if (norm == "l1") {
      c.env.dense_norm = DenseNorm::kL1;
    } else if (norm == "l2") {
      c.env.dense_norm = DenseNorm::kL2;
    } else {
      problems.push_back("env.dense_norm: expected \"l1\" or \"l2\"");
    }
    std::vector<double> goal{c.env.dynamics_goal.x(), c.env.dynamics_goal.y()};
    r.Read("dynamics_goal", goal);
    if (goal.size() == 2) {
      c.env.dynamics_goal = Vec2(goal[0], goal[1]);
    } else {
      problems.push_back("env.dynamics_goal: expected two numbers");
    }
    r.Read("rotation_unit", c.env.rotation_unit);
    r.Read("drift_unit", c.env.drift_unit);
    r.Read("noise_unit", c.env.noise_unit);
    r.Finish();
  }
  if (const json* node = root.Child("cbvi")) {
    ObjectReader r(*node, "cbvi", problems);
    auto& v = c.cbvi;
    r.Read("num_clusters", v.num_clusters);
    r.Read("latent_dim", v.latent_dim);
    r.Read("embed_dim", v.embed_dim);
    r.Read("cluster_hidden", v.cluster_hidden);
    r.Read("task_hidden", v.task_hidden);
    r.Read("stacked", v.stacked);
    r.Read("decoder_hidden", v.decoder_hidden);
    r.Read("lambda_s", v.lambda_s);
    r.Read("lambda_i", v.lambda_i);
    r.Read("lambda_p", v.lambda_p);
    r.Read("gumbel_temperature", v.gumbel_temperature);
    r.Read("straight_through", v.straight_through);
    r.Read("elbo_stride", v.elbo_stride);
    r.Read("mc_samples", v.mc_samples);
    r.Read("decode_subsample", v.decode_subsample);
    r.Read("learning_rate", v.learning_rate);
    r.Read("target_sync_interval", v.target_sync_interval);
    r.Read("batch_trials", v.batch_trials);
    r.Read("updates_per_iteration", v.updates_per_iteration);
    r.Read("prior_init_std", v.prior_init_std);
    r.Read("action_scale", v.action_scale);
    r.Finish();
  }
  if (const json* node = root.Child("intrinsic")) {
    ObjectReader r(*node, "intrinsic", problems);
    auto& s = c.intrinsic;
    r.Read("a_h", s.a_h);
    r.Read("b_h", s.b_h);
    r.Read("s_h", s.s_h);
    r.Read("a_c", s.a_c);
    r.Read("b_c", s.b_c);
    r.Read("s_c", s.s_c);
    r.Read("entropy_enabled", s.entropy_enabled);
    r.Read("consistency_enabled", s.consistency_enabled);
    r.Finish();
  }
  if (const json* node = root.Child("policy")) {
    ObjectReader r(*node, "policy", problems);
    r.Read("hidden", c.policy.hidden);
    r.Read("init_log_std", c.policy.init_log_std);
    r.Read("min_log_std", c.policy.min_log_std);
    r.Read("max_log_std", c.policy.max_log_std);
    r.Read("action_scale", c.policy.action_scale);
    r.Read("normalize_inputs", c.policy.normalize_inputs);
    r.Read("input_clip", c.policy.input_clip);
    r.Finish();
  }
  if (const json* node = root.Child("ppo")) {
    ObjectReader r(*node, "ppo", problems);
    auto& p = c.ppo;
    r.Read("learning_rate", p.learning_rate);
    r.Read("clip", p.clip);
    r.Read("value_coef", p.value_coef);
    r.Read("entropy_coef", p.entropy_coef);
    r.Read("huber_delta", p.huber_delta);
    r.Read("gamma", p.gamma);
    r.Read("gae_lambda", p.gae_lambda);
    r.Read("epochs", p.epochs);
    r.Read("minibatch", p.minibatch);
    r.Read("max_grad_norm", p.max_grad_norm);
    r.Read("normalize_returns", p.normalize_returns);
    r.Read("normalize_advantages", p.normalize_advantages);
    r.Finish();
  }
  if (const json* node = root.Child("train")) {
    ObjectReader r(*node, "train", problems);
    auto& t = c.train;
    r.Read("iterations", t.iterations);
    r.Read("trials_per_iteration", t.trials_per_iteration);
    r.Read("exploit_episodes", t.exploit_episodes);
    r.Read("n_train", t.n_train);
    r.Read("n_test", t.n_test);
    r.Read("buffer_capacity", t.buffer_capacity);
    r.Read("eval_interval", t.eval_interval);
    r.Read("checkpoint_interval", t.checkpoint_interval);
    r.Read("rollout_workers", t.rollout_workers);
    r.Read("rollout_chunk", t.rollout_chunk);
    r.Read("exploration_enabled", t.exploration_enabled);
    r.Finish();
  }
  root.Finish();

  // Unread or ill-typed fields kept their defaults, so validating the rest
  // still reports every problem at once.
  for (auto& p : c.Validate()) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return RunConfigFromJson(j);
}

void SaveRunConfig(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config " + path);
  out << ToJson(cfg).dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing config " + path);
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Fingerprint(const RunConfig& cfg) {
  json j = ToJson(cfg);
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(j.dump())));
  return buf;
}

}  // namespace taskclust
