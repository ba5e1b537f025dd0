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


#ifndef TASKCLUST_CONFIG_HPP_
#define TASKCLUST_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "taskclust/cbvi.hpp"
#include "taskclust/environments.hpp"
#include "taskclust/intrinsic_rewards.hpp"
#include "taskclust/policy.hpp"
#include "taskclust/ppo.hpp"
#include "taskclust/task_distribution.hpp"

namespace taskclust {

inline constexpr int kConfigSchemaVersion = 1;

struct TrainConfig {
  int iterations = 1000;
  int trials_per_iteration = 16;
  // N exploitation episodes after the exploration episode.
  int exploit_episodes = 1;
  int n_train = 500;
  int n_test = 32;
  int buffer_capacity = 2000;
  // Held-out evaluation every eval_interval iterations and after the last.
  int eval_interval = 50;
  // 0: checkpoint only at the end.
  int checkpoint_interval = 0;
  int rollout_workers = 8;
  int rollout_chunk = 16;
  // false: pi_phi rolls both episodes and pi_psi is never trained.
  bool exploration_enabled = true;

  std::vector<std::string> Validate() const;
};

struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  // Free-form label, e.g. the ablation variant.
  std::string variant = "full";
  MixtureConfig task;
  EnvConfig env;
  cbvi::CbviConfig cbvi;
  DecaySchedule intrinsic;
  PolicyConfig policy;
  PpoConfig ppo;
  TrainConfig train;

  // Offending keys, one message each; empty when valid.
  std::vector<std::string> Validate() const;
  // Intrinsic schedule with the horizon taken from the environment.
  DecaySchedule Schedule() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

nlohmann::json ToJson(const RunConfig& cfg);
// Rejects unknown keys and ill-typed values; missing keys keep defaults.
// Throws ConfigError listing every problem, including Validate() failures.
RunConfig RunConfigFromJson(const nlohmann::json& j);
RunConfig LoadRunConfig(const std::string& path);
void SaveRunConfig(const RunConfig& cfg, const std::string& path);

// Stable 64-bit FNV-1a hash of the canonical JSON form, output_dir excluded,
// as 16 hex digits.
std::string Fingerprint(const RunConfig& cfg);
std::uint64_t Fnv1a64(const std::string& bytes);

}  // namespace taskclust

#endif  // TASKCLUST_CONFIG_HPP_
