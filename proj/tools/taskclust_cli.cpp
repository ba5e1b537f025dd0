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


// Command-line entry point: train, eval, ablate, sweep-clusters, plot.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taskclust/checkpoint.hpp"
#include "taskclust/config.hpp"
#include "taskclust/evaluation.hpp"
#include "taskclust/plot.hpp"
#include "taskclust/trainer.hpp"

namespace {

using taskclust::RunConfig;

void PrintRecord(const taskclust::MetricRecord& r) {
  std::cout << "iter " << r.iteration << "  frames " << r.frames;
  for (std::size_t e = 0; e < r.test_returns.size(); ++e) {
    std::cout << "  ep" << e + 1 << " " << r.test_returns[e];
  }
  std::cout << "  nmi " << r.nmi << std::endl;
}

void WriteTable(const taskclust::StudyTable& table, const std::string& dir,
                const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / stem;
  taskclust::WriteJsonFile(base.string() + ".json", table.ToJson(), 2);
  std::ofstream md(base.string() + ".md");
  md << table.ToMarkdown();
  if (!md) throw std::runtime_error("cannot write " + base.string() + ".md");
  std::cout << table.ToMarkdown();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meta-RL with exploratory task clustering on point-robot tasks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint_path;
  std::string output_dir;
  std::string run_dir;
  std::string report_path;
  int iterations = -1;
  int seeds = 3;
  std::vector<int> counts{2, 4, 6, 8, 10};

  auto* train = app.add_subcommand("train", "Meta-train and write checkpoint + metrics");
  train->add_option("config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--output-dir", output_dir, "override output_dir");
  train->add_option("--iterations", iterations, "override train.iterations");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the held-out tasks");
  eval->add_option("checkpoint", checkpoint_path)->required()->check(CLI::ExistingFile);
  eval->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--report", report_path, "write the report JSON here");

  auto* ablate = app.add_subcommand("ablate", "Train and evaluate the ablation variants");
  ablate->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  ablate->add_option("--seeds", seeds, "seeds per variant")->check(CLI::PositiveNumber);
  ablate->add_option("--output-dir", output_dir, "override output_dir");

  auto* sweep = app.add_subcommand("sweep-clusters", "Train and evaluate over model cluster counts");
  sweep->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("--seeds", seeds, "seeds per count")->check(CLI::PositiveNumber);
  sweep->add_option("--counts", counts, "cluster counts")->delimiter(',');
  sweep->add_option("--output-dir", output_dir, "override output_dir");

  auto* plot = app.add_subcommand("plot", "Render SVG plots for a finished run");
  plot->add_option("run-dir", run_dir)->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&]() {
      RunConfig cfg = taskclust::LoadRunConfig(config_path);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      if (iterations >= 0) cfg.train.iterations = iterations;
      if (auto problems = cfg.Validate(); !problems.empty()) {
        throw taskclust::ConfigError(std::move(problems));
      }
      return cfg;
    };

    if (*train) {
      const RunConfig cfg = load();
      std::cout << "config " << taskclust::Fingerprint(cfg) << " -> " << cfg.output_dir
                << std::endl;
      const auto out = taskclust::MetaTrain(cfg, PrintRecord);
      std::cout << "checkpoint " << out.checkpoint_path << "\nmetrics " << out.metrics_path
                << std::endl;
    } else if (*eval) {
      const RunConfig cfg = load();
      const auto report = taskclust::EvaluateCheckpoint(checkpoint_path, cfg);
      for (std::size_t e = 0; e < report.mean_returns.size(); ++e) {
        std::cout << "episode " << e + 1 << ": " << report.mean_returns[e] << " ± "
                  << report.stderr_returns[e] << "\n";
      }
      std::cout << "NMI end of exploration: " << report.nmi_final
                << "  mean over steps: " << report.nmi_mean << std::endl;
      if (!report_path.empty()) taskclust::WriteJsonFile(report_path, taskclust::ToJson(report));
    } else if (*ablate) {
      const RunConfig cfg = load();
      auto progress = [](const std::string& msg) { std::cout << msg << std::endl; };
      WriteTable(taskclust::RunAblations(cfg, seeds, progress), cfg.output_dir, "ablations");
    } else if (*sweep) {
      const RunConfig cfg = load();
      auto progress = [](const std::string& msg) { std::cout << msg << std::endl; };
      WriteTable(taskclust::SweepClusters(cfg, counts, seeds, progress), cfg.output_dir,
                 "cluster_sweep");
    } else if (*plot) {
      for (const auto& path : taskclust::plot::WriteRunPlots(run_dir)) std::cout << path << "\n";
    }
  } catch (const taskclust::ConfigError& e) {
    std::cerr << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
