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

#ifndef TASKCLUST_AUTODIFF_HPP_
#define TASKCLUST_AUTODIFF_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

// Reverse-mode automatic differentiation over dense matrices.
//
// A Var is a shared handle to a graph node. Operations on Vars record a
// backward closure whenever gradient recording is enabled on the calling
// thread and at least one operand requires a gradient. Backward() walks the
// graph reachable from a scalar output in reverse creation order.
//
// Column-major batch convention used throughout the library: features along
// rows, batch entries along columns.
namespace taskclust::ad {

using Matrix = Eigen::MatrixXd;

struct Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  std::uint64_t order = 0;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Lazily zero-initialised gradient buffer.
  Matrix& Grad();
};

class Var {
 public:
  Var() = default;
  explicit Var(Matrix value, bool requires_grad = false);
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Var Scalar(double v);
  static Var Parameter(Matrix value) { return Var(std::move(value), true); }

  const Matrix& value() const { return node_->value; }
  // Mutable access for optimizers and checkpoint loading; not tracked.
  Matrix& mutable_value() { return node_->value; }
  const Matrix& grad() const { return node_->grad; }
  Matrix& mutable_grad() { return node_->Grad(); }
  void ZeroGrad();

  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return static_cast<bool>(node_); }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double item() const;

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Runs reverse accumulation from a 1x1 output. Gradients accumulate into
// every reachable node that requires them, including leaf parameters.
void Backward(const Var& output);

bool GradEnabled();

// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

Var Constant(Matrix value);
Var StopGradient(const Var& a);

Var MatMul(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
// a (m x n) + b (m x 1) broadcast over columns.
Var AddColumn(const Var& a, const Var& b);
// a (m x n) * r (1 x n) broadcast over rows.
Var MulRow(const Var& a, const Var& r);
Var Scale(const Var& a, double s);
Var AddScalar(const Var& a, double s);
Var Neg(const Var& a);

Var Sigmoid(const Var& a);
Var Tanh(const Var& a);
Var Relu(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);
Var Square(const Var& a);
Var Clamp(const Var& a, double lo, double hi);
Var Minimum(const Var& a, const Var& b);
Var Huber(const Var& a, double delta);

Var Rows(const Var& a, Eigen::Index start, Eigen::Index count);
Var Cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var VCat(const std::vector<Var>& parts);
Var HCat(const std::vector<Var>& parts);
// Tiles a (m x n) horizontally `times` times.
Var RepeatCols(const Var& a, Eigen::Index times);

Var Sum(const Var& a);
Var Mean(const Var& a);
// Sums each run of `block` consecutive columns: m x (n / block).
Var BlockColSum(const Var& a, Eigen::Index block);
// Column sums, 1 x n.
Var SumRows(const Var& a);
// Row sums, m x 1.
Var SumCols(const Var& a);

// Column-wise softmax / log-softmax.
Var Softmax(const Var& a);
Var LogSoftmax(const Var& a);

// out(:, t * N + i) = a(:, i) + b(:, t) for a (h x N), b (h x T).
Var PairAdd(const Var& a, const Var& b);

// Forward: column-wise one-hot of the argmax (lowest index on ties).
// Backward: identity, i.e. the straight-through estimator.
Var StraightThroughOneHot(const Var& soft);

inline Var operator+(const Var& a, const Var& b) { return Add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return Sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return Mul(a, b); }
inline Var operator-(const Var& a) { return Neg(a); }
inline Var operator*(double s, const Var& a) { return Scale(a, s); }
inline Var operator*(const Var& a, double s) { return Scale(a, s); }

// Column-wise one-hot of the argmax, lowest index on ties.
Matrix ArgmaxOneHot(const Matrix& m);

}  // namespace taskclust::ad

#endif  // TASKCLUST_AUTODIFF_HPP_
