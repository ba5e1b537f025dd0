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

#include "taskclust/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace taskclust::nn {
namespace {

Matrix Uniform(int rows, int cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  // Column-major fill order is fixed so initialisation is reproducible.
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

}  // namespace

void ParameterList::Append(const std::string& prefix, const ParameterList& other) {
  for (const auto& [name, p] : other.items_) items_.emplace_back(prefix + name, p);
}

std::size_t ParameterList::NumScalars() const {
  std::size_t n = 0;
  for (const auto& [_, p] : items_) n += static_cast<std::size_t>(p.value().size());
  return n;
}

void ParameterList::ZeroGrad() {
  for (auto& [_, p] : items_) p.ZeroGrad();
}

double ParameterList::GradNorm() const {
  double sq = 0.0;
  for (const auto& [_, p] : items_) {
    if (p.grad().size() != 0) sq += p.grad().squaredNorm();
  }
  return std::sqrt(sq);
}

double ParameterList::ClipGradNorm(double max_norm) {
  const double norm = GradNorm();
  if (norm > max_norm && norm > 0.0) {
    const double s = max_norm / norm;
    for (auto& [_, p] : items_) {
      if (p.grad().size() != 0) p.mutable_grad() *= s;
    }
  }
  return norm;
}

Eigen::VectorXd ParameterList::Flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(NumScalars()));
  Eigen::Index k = 0;
  for (const auto& [_, p] : items_) {
    const auto n = p.value().size();
    flat.segment(k, n) = p.value().reshaped();
    k += n;
  }
  return flat;
}

void ParameterList::Unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(NumScalars())) {
    throw std::invalid_argument("Unflatten: size mismatch");
  }
  Eigen::Index k = 0;
  for (auto& [_, p] : items_) {
    Matrix& v = p.mutable_value();
    v.reshaped() = flat.segment(k, v.size());
    k += v.size();
  }
}

Eigen::VectorXd ParameterList::FlattenGrad() const {
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(NumScalars()));
  Eigen::Index k = 0;
  for (const auto& [_, p] : items_) {
    const auto n = p.value().size();
    if (p.grad().size() == n) flat.segment(k, n) = p.grad().reshaped();
    k += n;
  }
  return flat;
}

Linear::Linear(int in, int out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight = Var::Parameter(Uniform(out, in, bound, rng));
  bias = Var::Parameter(Uniform(out, 1, bound, rng));
}

void Linear::Register(const std::string& prefix, ParameterList& params) const {
  params.Add(prefix + "weight", weight);
  params.Add(prefix + "bias", bias);
}

Mlp::Mlp(int in, const std::vector<int>& hidden, int out, std::mt19937_64& rng) {
  int prev = in;
  for (int h : hidden) {
    layers.emplace_back(prev, h, rng);
    prev = h;
  }
  layers.emplace_back(prev, out, rng);
}

Var Mlp::operator()(const Var& x) const {
  Var h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layers[i](h);
    if (i + 1 < layers.size()) h = ad::Tanh(h);
  }
  return h;
}

void Mlp::Register(const std::string& prefix, ParameterList& params) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].Register(prefix + std::to_string(i) + ".", params);
  }
}

GruCell::GruCell(int in, int hidden, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  w_input = Var::Parameter(Uniform(3 * hidden, in, bound, rng));
  w_hidden = Var::Parameter(Uniform(3 * hidden, hidden, bound, rng));
  b_input = Var::Parameter(Uniform(3 * hidden, 1, bound, rng));
  b_hidden = Var::Parameter(Uniform(3 * hidden, 1, bound, rng));
}

Var GruCell::operator()(const Var& x, const Var& h) const {
  const int n = hidden_size();
  Var gi = ad::AddColumn(ad::MatMul(w_input, x), b_input);
  Var gh = ad::AddColumn(ad::MatMul(w_hidden, h), b_hidden);
  Var reset = ad::Sigmoid(ad::Rows(gi, 0, n) + ad::Rows(gh, 0, n));
  Var update = ad::Sigmoid(ad::Rows(gi, n, n) + ad::Rows(gh, n, n));
  Var cand = ad::Tanh(ad::Rows(gi, 2 * n, n) + reset * ad::Rows(gh, 2 * n, n));
  // h' = n + u * (h - n)
  return cand + update * (h - cand);
}

void GruCell::Register(const std::string& prefix, ParameterList& params) const {
  params.Add(prefix + "w_input", w_input);
  params.Add(prefix + "w_hidden", w_hidden);
  params.Add(prefix + "b_input", b_input);
  params.Add(prefix + "b_hidden", b_hidden);
}

Adam::Adam(ParameterList params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  for (const auto& [_, p] : params_.items()) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::Step() {
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  const double lr = config_.learning_rate;
  std::size_t i = 0;
  for (const auto& [_, p_const] : params_.items()) {
    Var p = p_const;
    const Matrix& g = p.grad();
    if (g.size() == p.value().size()) {
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
      p.mutable_value().array() -=
          lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.epsilon);
    }
    ++i;
  }
}

void Adam::SetState(long step, std::vector<Matrix> m, std::vector<Matrix> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::invalid_argument("Adam::SetState: parameter count mismatch");
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i].rows() != m_[i].rows() || m[i].cols() != m_[i].cols() ||
        v[i].rows() != v_[i].rows() || v[i].cols() != v_[i].cols()) {
      throw std::invalid_argument("Adam::SetState: moment shape mismatch");
    }
  }
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace taskclust::nn
