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


// Enumerable toy instance of the inference model: two clusters, a scalar
// latent and a four-step trial. The evidence and the ELBO are computed by
// exhaustive summation over clusters and quadrature over z; the library's
// single-sample estimator is averaged separately as a second route.

#ifndef TASKCLUST_TESTS_TOY_ELBO_HPP_
#define TASKCLUST_TESTS_TOY_ELBO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "taskclust/cbvi.hpp"

namespace taskclust::testing {

struct ToyElbo {
  double log_evidence = 0.0;
  double elbo_quadrature = 0.0;
  double elbo_monte_carlo = 0.0;
  double monte_carlo_stderr = 0.0;
};

inline cbvi::CbviConfig ToyConfig() {
  cbvi::CbviConfig cfg;
  cfg.num_clusters = 2;
  cfg.latent_dim = 1;
  cfg.embed_dim = 4;
  cfg.cluster_hidden = 4;
  cfg.task_hidden = 4;
  cfg.decoder_hidden = 4;
  cfg.lambda_s = 0.0;
  return cfg;
}

inline Trajectory ToyTrial(std::mt19937_64& rng, int length) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Trajectory traj(static_cast<std::size_t>(length));
  Vec2 s = Vec2::Zero();
  for (auto& tr : traj) {
    tr.state = s;
    tr.action = Vec2(0.1 * u(rng), 0.1 * u(rng));
    tr.next_state = s + tr.action;
    tr.reward = u(rng);
    s = tr.next_state;
  }
  return traj;
}

// Evaluates ELBO_t for the trial encoded up to step t under the model drawn
// from `seed`, with the L2 reconstruction read as a Gaussian likelihood of
// variance 1/2, i.e. log p(r | z) = -(r - r_hat)^2 - 0.5 ln(pi).
inline ToyElbo EvaluateToyElbo(std::uint64_t seed, int t, int mc_draws) {
  const cbvi::CbviConfig cfg = ToyConfig();
  cbvi::CbviModel model(cfg, seed);
  std::mt19937_64 rng(seed ^ 0x70f);
  // Spread the cluster prior so that the two components differ visibly.
  {
    std::normal_distribution<double> n(0.0, 1.0);
    auto& prior = model.mutable_prior();
    for (Eigen::Index c = 0; c < prior.mean.cols(); ++c) {
      prior.mean.mutable_value()(0, c) = n(rng);
      prior.logstd.mutable_value()(0, c) = 0.3 * n(rng);
    }
  }
  const Trajectory traj = ToyTrial(rng, 4);
  const auto trial = cbvi::TrialTensors::FromTrajectory(traj, cfg.action_scale);
  const int n = trial.length();
  const double log_norm = -0.5 * n * std::log(M_PI);

  ad::NoGradGuard guard;
  const cbvi::Encoder& enc = model.encoder();
  auto step = enc.InitialStep(1);
  for (int i = 0; i < t; ++i) step = enc.Advance(step, ad::Constant(trial.features.col(i)));

  const int C = cfg.num_clusters;
  const Eigen::VectorXd logits = step.logits.value().col(0);
  const Eigen::VectorXd q = (logits.array() - logits.maxCoeff()).exp().matrix() /
                            (logits.array() - logits.maxCoeff()).exp().sum();
  std::vector<double> qm(C), qs(C), pm(C), ps(C);
  for (int c = 0; c < C; ++c) {
    ad::Matrix oh = ad::Matrix::Zero(C, 1);
    oh(c, 0) = 1.0;
    qm[c] = enc.ZMean(step.h_beta, ad::Constant(oh)).value()(0, 0);
    qs[c] = std::exp(enc.ZLogStd(step.h_beta, ad::Constant(oh)).value()(0, 0));
    pm[c] = model.prior().mean.value()(0, c);
    ps[c] = std::exp(model.prior().logstd.value()(0, c));
  }

  double lo = 1e300, hi = -1e300;
  for (int c = 0; c < C; ++c) {
    lo = std::min({lo, qm[c] - 12.0 * qs[c], pm[c] - 12.0 * ps[c]});
    hi = std::max({hi, qm[c] + 12.0 * qs[c], pm[c] + 12.0 * ps[c]});
  }
  const int intervals = 8000;
  ad::Matrix grid(1, intervals + 1);
  for (int i = 0; i <= intervals; ++i) grid(0, i) = lo + (hi - lo) * i / intervals;
  const ad::Matrix recon =
      cbvi::ReconstructionLoss(model.decoders(), trial, ad::Constant(grid)).value();
  std::vector<double> log_lik(static_cast<std::size_t>(intervals + 1));
  for (int i = 0; i <= intervals; ++i) log_lik[i] = -recon(0, i) + log_norm;
  const double shift = *std::max_element(log_lik.begin(), log_lik.end());
  auto at = [&](double z) {
    const auto i = static_cast<std::size_t>(std::llround((z - lo) / (hi - lo) * intervals));
    return log_lik[std::min<std::size_t>(i, log_lik.size() - 1)];
  };

  ToyElbo out;
  double evidence = 0.0;
  for (int c = 0; c < C; ++c) {
    evidence += (1.0 / C) * Integrate(
                                [&](double z) { return NormalPdf(z, pm[c], ps[c]) * std::exp(at(z) - shift); },
                                lo, hi, intervals);
  }
  out.log_evidence = std::log(evidence) + shift;

  double elbo = 0.0;
  for (int c = 0; c < C; ++c) {
    const double expected_ll =
        Integrate([&](double z) { return NormalPdf(z, qm[c], qs[c]) * at(z); }, lo, hi, intervals);
    const double kl_z = NumericGaussianKl(qm[c], qs[c], pm[c], ps[c]);
    elbo += q[c] * (expected_ll - kl_z);
    if (q[c] > 0.0) elbo -= q[c] * std::log(q[c] * C);
  }
  out.elbo_quadrature = elbo;

  std::mt19937_64 noise(seed ^ 0x3c);
  std::uniform_real_distribution<double> u(1e-300, 1.0);
  std::normal_distribution<double> normal;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < mc_draws; ++k) {
    ad::Matrix gumbel(C, 1);
    for (int c = 0; c < C; ++c) gumbel(c, 0) = -std::log(-std::log(u(noise)));
    ad::Matrix eps(1, 1);
    eps(0, 0) = normal(noise);
    const double v = cbvi::ElboAt(enc, step, model.prior(), model.decoders(), trial, gumbel, eps,
                                  1.0, true)
                         .item() +
                     log_norm;
    sum += v;
    sum_sq += v * v;
  }
  out.elbo_monte_carlo = sum / mc_draws;
  const double var = std::max(0.0, sum_sq / mc_draws - out.elbo_monte_carlo * out.elbo_monte_carlo);
  out.monte_carlo_stderr = std::sqrt(var / mc_draws);
  return out;
}

}  // namespace taskclust::testing

#endif  // TASKCLUST_TESTS_TOY_ELBO_HPP_
