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

#ifndef TASKCLUST_NN_HPP_
#define TASKCLUST_NN_HPP_

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "taskclust/autodiff.hpp"

namespace taskclust::nn {

using ad::Matrix;
using ad::Var;

// Named parameter handles; the Vars share nodes with the owning module.
class ParameterList {
 public:
  void Add(std::string name, Var param) { items_.emplace_back(std::move(name), std::move(param)); }
  void Append(const std::string& prefix, const ParameterList& other);

  const std::vector<std::pair<std::string, Var>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t NumScalars() const;

  void ZeroGrad();
  double GradNorm() const;
  // Scales gradients so that their global norm is at most max_norm; returns
  // the pre-clip norm.
  double ClipGradNorm(double max_norm);

  // Flattened copies, used by finite-difference checks and snapshots.
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd& flat);
  Eigen::VectorXd FlattenGrad() const;

 private:
  std::vector<std::pair<std::string, Var>> items_;
};

struct Linear {
  Var weight;  // out x in
  Var bias;    // out x 1

  Linear() = default;
  Linear(int in, int out, std::mt19937_64& rng);

  Var operator()(const Var& x) const { return ad::AddColumn(ad::MatMul(weight, x), bias); }
  int in() const { return static_cast<int>(weight.cols()); }
  int out() const { return static_cast<int>(weight.rows()); }
  void Register(const std::string& prefix, ParameterList& params) const;
};

// Fully connected network with tanh hidden activations and a linear output.
struct Mlp {
  std::vector<Linear> layers;

  Mlp() = default;
  Mlp(int in, const std::vector<int>& hidden, int out, std::mt19937_64& rng);

  Var operator()(const Var& x) const;
  void Register(const std::string& prefix, ParameterList& params) const;
};

// Gated recurrent unit with the reset gate applied to the projected hidden
// state:
//   r = sigmoid(Wr x + Ur h + br), u = sigmoid(Wu x + Uu h + bu)
//   n = tanh(Wn x + bn_x + r * (Un h + bn_h)),  h' = (1 - u) * n + u * h
struct GruCell {
  Var w_input;   // 3H x in, rows ordered (reset, update, candidate)
  Var w_hidden;  // 3H x H
  Var b_input;   // 3H x 1
  Var b_hidden;  // 3H x 1

  GruCell() = default;
  GruCell(int in, int hidden, std::mt19937_64& rng);

  Var operator()(const Var& x, const Var& h) const;
  int hidden_size() const { return static_cast<int>(w_hidden.cols()); }
  void Register(const std::string& prefix, ParameterList& params) const;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(ParameterList params, AdamConfig config);

  void Step();
  void ZeroGrad() { params_.ZeroGrad(); }
  const ParameterList& params() const { return params_; }
  AdamConfig& config() { return config_; }
  long step_count() const { return step_; }

  // Optimizer state as named moment matrices, for checkpoints.
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void SetState(long step, std::vector<Matrix> m, std::vector<Matrix> v);

 private:
  ParameterList params_;
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long step_ = 0;
};

}  // namespace taskclust::nn

#endif  // TASKCLUST_NN_HPP_
