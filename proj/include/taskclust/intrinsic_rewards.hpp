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

#ifndef TASKCLUST_INTRINSIC_REWARDS_HPP_
#define TASKCLUST_INTRINSIC_REWARDS_HPP_

#include <Eigen/Core>

namespace taskclust {

// Probabilities below this are clamped before taking logs.
inline constexpr double kProbabilityFloor = 1e-8;

// Shannon entropy in nats.
double Entropy(const Eigen::VectorXd& p);
// KL(p || q) in nats with both arguments clamped at kProbabilityFloor.
double CategoricalKl(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Entropy reduction of the cluster posterior caused by one transition.
double RewardEntropyReduction(const Eigen::VectorXd& q_before, const Eigen::VectorXd& q_after);
// Negative KL between consecutive cluster posteriors; always <= 0.
double RewardConsistency(const Eigen::VectorXd& q_before, const Eigen::VectorXd& q_after);

// Time-dependent weights of the two intrinsic terms:
//   gamma_h(t) = b_h - a_h exp(-s_h (H - t))
//   gamma_c(t) = -b_c + a_c exp(-s_c (H - t))
struct DecaySchedule {
  double a_h = 0.1;
  double b_h = 0.1;
  double s_h = 0.1;
  double a_c = 0.2;
  double b_c = 0.1;
  double s_c = 0.1;
  int horizon = 100;
  // Ablation switch: forces gamma_c to zero.
  bool consistency_enabled = true;
  // Ablation switch: forces gamma_h to zero.
  bool entropy_enabled = true;

  double GammaH(double t) const;
  double GammaC(double t) const;
};

// r_e = r_env + gamma_h(t) r_h + gamma_c(t) r_c
double ComposeExplorationReward(double r_env, double r_h, double r_c, double t,
                                const DecaySchedule& schedule);

}  // namespace taskclust

#endif  // TASKCLUST_INTRINSIC_REWARDS_HPP_
