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

#include "taskclust/intrinsic_rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace taskclust {

double Entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

double CategoricalKl(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw std::invalid_argument("CategoricalKl: size mismatch");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    const double pi = std::max(p[i], kProbabilityFloor);
    const double qi = std::max(q[i], kProbabilityFloor);
    kl += pi * (std::log(pi) - std::log(qi));
  }
  return std::max(kl, 0.0);
}

double RewardEntropyReduction(const Eigen::VectorXd& q_before, const Eigen::VectorXd& q_after) {
  return Entropy(q_before) - Entropy(q_after);
}

double RewardConsistency(const Eigen::VectorXd& q_before, const Eigen::VectorXd& q_after) {
  return -CategoricalKl(q_before, q_after);
}

double DecaySchedule::GammaH(double t) const {
  if (!entropy_enabled) return 0.0;
  return b_h - a_h * std::exp(-s_h * (horizon - t));
}

double DecaySchedule::GammaC(double t) const {
  if (!consistency_enabled) return 0.0;
  return -b_c + a_c * std::exp(-s_c * (horizon - t));
}

double ComposeExplorationReward(double r_env, double r_h, double r_c, double t,
                                const DecaySchedule& schedule) {
  return r_env + schedule.GammaH(t) * r_h + schedule.GammaC(t) * r_c;
}

}  // namespace taskclust
