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


#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "taskclust/task_distribution.hpp"

using taskclust::MixtureConfig;
using taskclust::TaskFamily;
using taskclust::TaskSpec;

TEST_CASE("goal at the cluster-0 mean angle") {
  MixtureConfig cfg;
  const TaskSpec t = taskclust::MakeGoalTask(cfg, 0, 0.25);
  REQUIRE(t.goal.has_value());
  CHECK((*t.goal)[0] == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK((*t.goal)[1] == doctest::Approx(1.41421).epsilon(1e-5));
  CHECK_FALSE(t.dynamics.has_value());
}

TEST_CASE("uniform family at angle zero") {
  MixtureConfig cfg;
  cfg.family = TaskFamily::kGoalUniform;
  cfg.num_clusters = 1;
  cfg.angle_means = {1.0};
  cfg.angle_stds = {0.0};
  REQUIRE(cfg.Validate().empty());
  const TaskSpec t = taskclust::MakeGoalTask(cfg, 0, 0.0);
  CHECK((*t.goal)[0] == doctest::Approx(2.0));
  CHECK(std::abs((*t.goal)[1]) < 1e-12);
}

TEST_CASE("sampling is a pure function of the seed") {
  for (TaskFamily f : {TaskFamily::kGoalClustered, TaskFamily::kDynamicsClustered,
                       TaskFamily::kGoalSparse, TaskFamily::kGoalUniform}) {
    MixtureConfig cfg;
    cfg.family = f;
    if (f == TaskFamily::kGoalUniform) {
      cfg.num_clusters = 1;
      cfg.angle_means = {1.0};
      cfg.angle_stds = {0.0};
    }
    const TaskSpec a = taskclust::SampleTask(cfg, 42, 7);
    const TaskSpec b = taskclust::SampleTask(cfg, 42, 7);
    CHECK(a.cluster_id == b.cluster_id);
    CHECK(a.angle == b.angle);
    CHECK(a.goal.has_value() == b.goal.has_value());
    if (a.goal) CHECK(*a.goal == *b.goal);
    if (a.dynamics) CHECK(a.dynamics->multipliers == b.dynamics->multipliers);
    CHECK(taskclust::ValidateTask(a, cfg).empty());
  }
}

TEST_CASE("meta split has disjoint ids") {
  MixtureConfig cfg;
  const auto split = taskclust::MakeMetaSplit(cfg, 500, 32, 1);
  std::set<int> ids;
  for (const auto& t : split.train) ids.insert(t.task_id);
  for (const auto& t : split.test) ids.insert(t.task_id);
  CHECK(ids.size() == 532);

  const auto tiny = taskclust::MakeMetaSplit(cfg, 1, 1, 1);
  REQUIRE(tiny.train.size() == 1);
  REQUIRE(tiny.test.size() == 1);
  CHECK(tiny.train[0].task_id != tiny.test[0].task_id);
}

TEST_CASE("train split cluster frequencies within 3 standard errors") {
  MixtureConfig cfg;
  const auto split = taskclust::MakeMetaSplit(cfg, 500, 32, 11);
  std::vector<int> counts(4, 0);
  for (const auto& t : split.train) counts[t.cluster_id]++;
  const double se = std::sqrt(0.25 * 0.75 / 500.0);
  for (int c = 0; c < 4; ++c) CHECK(std::abs(counts[c] / 500.0 - 0.25) < 3.0 * se);
}

TEST_CASE("cluster frequencies and angle means over 1e4 draws") {
  MixtureConfig cfg;
  cfg.weights = {0.1, 0.2, 0.3, 0.4};
  const int n = 10000;
  std::vector<int> counts(4, 0);
  std::vector<double> angle_sum(4, 0.0);
  for (int i = 0; i < n; ++i) {
    const TaskSpec t = taskclust::SampleTask(cfg, 1000 + i, i);
    counts[t.cluster_id]++;
    angle_sum[t.cluster_id] += t.angle;
  }
  for (int c = 0; c < 4; ++c) {
    const double w = cfg.weights[c];
    CHECK(std::abs(counts[c] / double(n) - w) < 4.0 * std::sqrt(w * (1 - w) / n));
    const double mean = angle_sum[c] / counts[c];
    CHECK(std::abs(mean - cfg.angle_means[c]) < 4.0 * 0.2 / std::sqrt(counts[c]));
  }
}

TEST_CASE("dynamics tasks carry one parameter set per cluster") {
  MixtureConfig cfg;
  cfg.family = TaskFamily::kDynamicsClustered;
  for (int i = 0; i < 50; ++i) {
    const TaskSpec t = taskclust::SampleTask(cfg, i, i);
    REQUIRE(t.dynamics.has_value());
    CHECK_FALSE(t.goal.has_value());
    CHECK(static_cast<int>(t.dynamics->param_set) == cfg.param_sets[t.cluster_id]);
    CHECK(static_cast<int>(t.dynamics->multipliers.size()) ==
          taskclust::DynamicsParamSetSize(t.dynamics->param_set));
  }
}

TEST_CASE("invalid mixture configs are reported by field") {
  MixtureConfig cfg;
  cfg.weights = {0.5, 0.5};
  cfg.angle_stds = {0.2, -1.0, 0.2, 0.2};
  const auto errors = cfg.Validate();
  CHECK(errors.size() >= 2);
  bool weights = false, stds = false;
  for (const auto& e : errors) {
    weights |= e.find("weights") != std::string::npos;
    stds |= e.find("angle_stds") != std::string::npos;
  }
  CHECK(weights);
  CHECK(stds);
}
