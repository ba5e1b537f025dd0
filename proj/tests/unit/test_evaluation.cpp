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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "taskclust/evaluation.hpp"
#include "taskclust/trainer.hpp"
#include "temp_dir.hpp"

using taskclust::Nmi;
using taskclust::RunConfig;
using taskclust::testing::BruteForceNmi;

namespace {

RunConfig TinyRun(const std::string& dir) {
  RunConfig cfg;
  cfg.seed = 4;
  cfg.output_dir = dir;
  cfg.env.horizon = 20;
  cfg.task.num_clusters = 2;
  cfg.task.angle_means = {0.25, 1.25};
  cfg.task.angle_stds = {0.2, 0.2};
  cfg.task.param_sets = {0, 1};
  cfg.cbvi.num_clusters = 2;
  cfg.train.iterations = 2;
  cfg.train.trials_per_iteration = 4;
  cfg.train.n_train = 10;
  cfg.train.n_test = 32;
  cfg.train.rollout_workers = 2;
  return cfg;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("NMI examples") {
  CHECK(Nmi(std::vector<int>{0, 0, 1, 1}, std::vector<int>{1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(Nmi(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(Nmi(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) == doctest::Approx(0.0));
  CHECK(Nmi(std::vector<int>{0, 1, 2, 3}, std::vector<int>{0, 0, 0, 0}) == 0.0);
  CHECK(Nmi(std::vector<int>{}, std::vector<int>{}) == 0.0);
  CHECK_THROWS_AS(Nmi(std::vector<int>{0}, std::vector<int>{0, 1}), std::invalid_argument);
}

TEST_CASE("NMI is symmetric, label-invariant and matches a contingency-table oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 60);
    const int ka = 1 + static_cast<int>(rng() % 5);
    const int kb = 1 + static_cast<int>(rng() % 5);
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng() % ka);
      // Partly correlated labels so that the values span (0, 1).
      b[i] = rng() % 3 == 0 ? static_cast<int>(rng() % kb) : a[i] % kb;
    }
    const double v = Nmi(a, b);
    CHECK(v == doctest::Approx(BruteForceNmi(a, b)).epsilon(1e-9));
    CHECK(v == doctest::Approx(Nmi(b, a)).epsilon(1e-12));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    std::vector<int> perm(ka);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> relabelled(n);
    for (int i = 0; i < n; ++i) relabelled[i] = 10 + perm[a[i]];
    CHECK(Nmi(relabelled, b) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("held-out report shape, NMI curve and determinism") {
  const auto dir = taskclust::testing::TempDir("eval_report");
  taskclust::Trainer trainer(TinyRun(dir.string()));
  const auto a = trainer.EvaluateTest();
  const auto b = trainer.EvaluateTest();
  REQUIRE(a.num_tasks() == 32);
  for (const auto& row : a.returns) CHECK(row.size() == 2);
  CHECK(a.mean_returns.size() == 2);
  CHECK(a.stderr_returns.size() == 2);
  CHECK(a.nmi_curve.size() == 20);
  CHECK(a.nmi_final == a.nmi_curve.back());
  CHECK(a.returns == b.returns);
  CHECK(a.nmi_curve == b.nmi_curve);

  std::vector<int> truth, inferred;
  for (const auto& s : a.assignments) {
    truth.push_back(s.true_cluster);
    inferred.push_back(s.inferred_cluster);
  }
  CHECK(a.nmi_final == doctest::Approx(Nmi(truth, inferred)).epsilon(1e-12));

  double mean0 = 0.0;
  for (const auto& row : a.returns) mean0 += row[0] / 32.0;
  CHECK(a.mean_returns[0] == doctest::Approx(mean0).epsilon(1e-12));

  for (const auto& trace : a.traces) {
    REQUIRE(trace.episodes.size() == 2);
    CHECK(trace.episodes[0].size() == 21);
    CHECK(trace.episodes[0].front().position.isZero());
    CHECK(trace.goal.has_value());
  }
}

TEST_CASE("report JSON round trip") {
  const auto dir = taskclust::testing::TempDir("eval_json");
  taskclust::Trainer trainer(TinyRun(dir.string()));
  const auto a = trainer.EvaluateTest();
  const auto b = taskclust::EvalReportFromJson(taskclust::ToJson(a));
  CHECK(b.returns == a.returns);
  CHECK(b.nmi_curve == a.nmi_curve);
  CHECK(b.fingerprint == a.fingerprint);
  CHECK(b.assignments.size() == a.assignments.size());
  CHECK(b.traces.size() == a.traces.size());
  CHECK(b.traces[3].episodes[1][7].position == a.traces[3].episodes[1][7].position);
}

TEST_CASE("evaluating a checkpoint leaves it untouched and reproduces the trainer") {
  const auto dir = taskclust::testing::TempDir("eval_ckpt");
  const RunConfig cfg = TinyRun(dir.string());
  taskclust::Trainer trainer(cfg);
  trainer.Iterate();
  const std::string path = (dir / "ckpt.json").string();
  trainer.SaveCheckpoint(path);
  const std::string before = Slurp(path);
  const auto time_before = std::filesystem::last_write_time(path);
  const auto report = taskclust::EvaluateCheckpoint(path, cfg);
  CHECK(Slurp(path) == before);
  CHECK(std::filesystem::last_write_time(path) == time_before);
  const auto direct = trainer.EvaluateTest();
  CHECK(report.returns == direct.returns);
  CHECK(report.iteration == 1);
}

TEST_CASE("ablation variants") {
  const auto& variants = taskclust::AblationVariants();
  CHECK(variants.size() == 6);
  const RunConfig base;
  for (const auto& v : variants) {
    const RunConfig c = taskclust::ApplyVariant(base, v);
    CHECK(c.variant == v);
    CHECK(c.Validate().empty());
  }
  const RunConfig no_cr = taskclust::ApplyVariant(base, "no-cr");
  CHECK(no_cr.cbvi.lambda_i == 0.0);
  CHECK(no_cr.cbvi.lambda_p == 0.0);
  CHECK(taskclust::ApplyVariant(base, "no-exploration").train.exploration_enabled == false);
  CHECK(taskclust::ApplyVariant(base, "no-sgru").cbvi.stacked == false);
  CHECK(taskclust::ApplyVariant(base, "rc-off").intrinsic.consistency_enabled == false);
  const RunConfig vb = taskclust::ApplyVariant(base, "varibad-g");
  CHECK(vb.cbvi.num_clusters == 1);
  CHECK_FALSE(vb.train.exploration_enabled);
  const RunConfig full = taskclust::ApplyVariant(base, "full");
  CHECK(taskclust::Fingerprint(full) != taskclust::Fingerprint(no_cr));
  CHECK_THROWS_AS(taskclust::ApplyVariant(base, "bogus"), std::invalid_argument);
}

TEST_CASE("study cells aggregate per-seed means") {
  taskclust::StudyCell cell;
  for (double m : {-10.0, -20.0, -30.0}) {
    taskclust::EvalReport r;
    r.mean_returns = {m, m / 2};
    r.nmi_final = -m / 100.0;
    cell.reports.push_back(r);
  }
  CHECK(cell.MeanReturns() == std::vector<double>{-20.0, -10.0});
  CHECK(cell.StderrReturns()[0] == doctest::Approx(10.0 / std::sqrt(3.0)));
  CHECK(cell.MeanFinalNmi() == doctest::Approx(0.2));
  taskclust::StudyTable table;
  table.title = "t";
  cell.label = "full";
  table.cells.push_back(cell);
  CHECK(table.ToMarkdown().find("full") != std::string::npos);
  CHECK(table.ToJson()["cells"].size() == 1);
}
