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


#ifndef TASKCLUST_TESTS_TINY_CBVI_HPP_
#define TASKCLUST_TESTS_TINY_CBVI_HPP_

#include <memory>
#include <random>
#include <vector>

#include "taskclust/cbvi.hpp"
#include "toy_elbo.hpp"

namespace taskclust::testing {

// C = 2, d_z = 2 model with tiny layers; relaxed Gumbel path so that every
// loss term is smooth in the parameters.
inline cbvi::CbviConfig TinyConfig() {
  cbvi::CbviConfig cfg;
  cfg.num_clusters = 2;
  cfg.latent_dim = 2;
  cfg.embed_dim = 4;
  cfg.cluster_hidden = 3;
  cfg.task_hidden = 3;
  cfg.decoder_hidden = 4;
  cfg.lambda_s = 1.0;
  cfg.elbo_stride = 3;
  cfg.straight_through = false;
  cfg.batch_trials = 2;
  cfg.decode_subsample = 0;
  cfg.updates_per_iteration = 1;
  return cfg;
}

struct TinyInstance {
  std::unique_ptr<cbvi::CbviModel> model;
  std::vector<Trajectory> trials;
  std::vector<const Trajectory*> ptrs;
};

inline TinyInstance MakeTiny(cbvi::CbviConfig cfg, std::uint64_t seed) {
  TinyInstance inst;
  inst.model = std::make_unique<cbvi::CbviModel>(cfg, seed);
  // Move the target away from the prior so L_P has a gradient.
  auto& prior = inst.model->mutable_prior();
  prior.target_mean.array() += 0.3;
  prior.target_logstd.array() -= 0.2;
  std::mt19937_64 rng(seed);
  // Two H = 4 episodes per trial.
  for (int b = 0; b < 2; ++b) inst.trials.push_back(ToyTrial(rng, 8));
  for (const auto& t : inst.trials) inst.ptrs.push_back(&t);
  return inst;
}

}  // namespace taskclust::testing

#endif  // TASKCLUST_TESTS_TINY_CBVI_HPP_
