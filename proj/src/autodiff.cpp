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

#include "taskclust/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace taskclust::ad {
namespace {

std::atomic<std::uint64_t> g_order{1};
thread_local bool t_grad_enabled = true;

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
  }
}

// Builds the result node. The closure is only kept when recording is on and
// some parent needs a gradient.
Var MakeResult(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->order = g_order.fetch_add(1, std::memory_order_relaxed);
  if (t_grad_enabled) {
    bool needs = false;
    for (const auto& p : parents) needs = needs || p.requires_grad();
    if (needs) {
      node->requires_grad = true;
      node->parents.reserve(parents.size());
      for (auto& p : parents) node->parents.push_back(p.node());
      node->backward = std::move(backward);
    }
  }
  return Var(std::move(node));
}

// Accumulates into parent i only if it participates in differentiation.
inline bool Wants(const Node& n, std::size_t i) { return n.parents[i]->requires_grad; }
inline Matrix& PGrad(Node& n, std::size_t i) { return n.parents[i]->Grad(); }
inline const Matrix& PVal(const Node& n, std::size_t i) { return n.parents[i]->value; }

}  // namespace

Matrix& Node::Grad() {
  if (grad.rows() != value.rows() || grad.cols() != value.cols()) {
    grad = Matrix::Zero(value.rows(), value.cols());
  }
  return grad;
}

Var::Var(Matrix value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
  node_->order = 0;
}

Var Var::Scalar(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return Var(std::move(m));
}

void Var::ZeroGrad() {
  if (node_) node_->grad = Matrix::Zero(node_->value.rows(), node_->value.cols());
}

double Var::item() const {
  if (rows() != 1 || cols() != 1) throw std::logic_error("item() on non-scalar Var");
  return node_->value(0, 0);
}

bool GradEnabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

void Backward(const Var& output) {
  if (output.rows() != 1 || output.cols() != 1) {
    throw std::logic_error("Backward requires a scalar output");
  }
  if (!output.requires_grad()) return;

  std::vector<Node*> nodes;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{output.node().get()};
  seen.insert(output.node().get());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (n->backward) nodes.push_back(n);
    for (const auto& p : n->parents) {
      if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const Node* a, const Node* b) { return a->order > b->order; });

  output.node()->Grad()(0, 0) += 1.0;
  for (Node* n : nodes) {
    if (n->grad.size() == 0) continue;  // no gradient reached this node
    n->backward(*n);
  }
}

Var Constant(Matrix value) { return Var(std::move(value), false); }

Var StopGradient(const Var& a) { return Var(a.value(), false); }

Var MatMul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("MatMul: inner dimension mismatch " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()));
  }
  return MakeResult(a.value() * b.value(), {a, b}, [](Node& n) {
    if (Wants(n, 0)) PGrad(n, 0).noalias() += n.grad * PVal(n, 1).transpose();
    if (Wants(n, 1)) PGrad(n, 1).noalias() += PVal(n, 0).transpose() * n.grad;
  });
}

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  return MakeResult(a.value() + b.value(), {a, b}, [](Node& n) {
    if (Wants(n, 0)) PGrad(n, 0) += n.grad;
    if (Wants(n, 1)) PGrad(n, 1) += n.grad;
  });
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Sub");
  return MakeResult(a.value() - b.value(), {a, b}, [](Node& n) {
    if (Wants(n, 0)) PGrad(n, 0) += n.grad;
    if (Wants(n, 1)) PGrad(n, 1) -= n.grad;
  });
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mul");
  return MakeResult(a.value().cwiseProduct(b.value()), {a, b}, [](Node& n) {
    if (Wants(n, 0)) PGrad(n, 0) += n.grad.cwiseProduct(PVal(n, 1));
    if (Wants(n, 1)) PGrad(n, 1) += n.grad.cwiseProduct(PVal(n, 0));
  });
}

Var AddColumn(const Var& a, const Var& b) {
  if (b.cols() != 1 || b.rows() != a.rows()) throw std::invalid_argument("AddColumn: shape");
  Matrix out = a.value().colwise() + b.value().col(0);
  return MakeResult(std::move(out), {a, b}, [](Node& n) {
    if (Wants(n, 0)) PGrad(n, 0) += n.grad;
    if (Wants(n, 1)) PGrad(n, 1) += n.grad.rowwise().sum();
  });
}

Var MulRow(const Var& a, const Var& r) {
  if (r.rows() != 1 || r.cols() != a.cols()) throw std::invalid_argument("MulRow: shape");
  Matrix out = a.value().array().rowwise() * r.value().row(0).array();
  return MakeResult(std::move(out), {a, r}, [](Node& n) {
    if (Wants(n, 0)) {
      PGrad(n, 0).array() += n.grad.array().rowwise() * PVal(n, 1).row(0).array();
    }
    if (Wants(n, 1)) PGrad(n, 1) += n.grad.cwiseProduct(PVal(n, 0)).colwise().sum();
  });
}

Var Scale(const Var& a, double s) {
  return MakeResult(a.value() * s, {a}, [s](Node& n) { PGrad(n, 0) += n.grad * s; });
}

Var AddScalar(const Var& a, double s) {
  return MakeResult(a.value().array() + s, {a}, [](Node& n) { PGrad(n, 0) += n.grad; });
}

Var Neg(const Var& a) { return Scale(a, -1.0); }

Var Sigmoid(const Var& a) {
  Matrix y = (1.0 + (-a.value().array()).exp()).inverse().matrix();
  return MakeResult(std::move(y), {a}, [](Node& n) {
    PGrad(n, 0).array() += n.grad.array() * n.value.array() * (1.0 - n.value.array());
  });
}

Var Tanh(const Var& a) {
  // 1 - 2 / (exp(2x) + 1): Eigen vectorises exp but not tanh for doubles.
  Matrix y = (1.0 - 2.0 / ((2.0 * a.value().array().max(-20.0).min(20.0)).exp() + 1.0)).matrix();
  return MakeResult(std::move(y), {a}, [](Node& n) {
    PGrad(n, 0).array() += n.grad.array() * (1.0 - n.value.array().square());
  });
}

Var Relu(const Var& a) {
  return MakeResult(a.value().cwiseMax(0.0), {a}, [](Node& n) {
    PGrad(n, 0).array() += (PVal(n, 0).array() > 0.0).select(n.grad.array(), 0.0);
  });
}

Var Exp(const Var& a) {
  return MakeResult(a.value().array().exp().matrix(), {a}, [](Node& n) {
    PGrad(n, 0).array() += n.grad.array() * n.value.array();
  });
}

Var Log(const Var& a) {
  return MakeResult(a.value().array().log().matrix(), {a}, [](Node& n) {
    PGrad(n, 0).array() += n.grad.array() / PVal(n, 0).array();
  });
}

Var Square(const Var& a) {
  return MakeResult(a.value().array().square().matrix(), {a}, [](Node& n) {
    PGrad(n, 0).array() += 2.0 * n.grad.array() * PVal(n, 0).array();
  });
}

Var Clamp(const Var& a, double lo, double hi) {
  return MakeResult(a.value().cwiseMax(lo).cwiseMin(hi), {a}, [lo, hi](Node& n) {
    const auto& x = PVal(n, 0).array();
    PGrad(n, 0).array() += ((x >= lo) && (x <= hi)).select(n.grad.array(), 0.0);
  });
}

Var Minimum(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Minimum");
  return MakeResult(a.value().cwiseMin(b.value()), {a, b}, [](Node& n) {
    const auto take_a = (PVal(n, 0).array() <= PVal(n, 1).array());
    if (Wants(n, 0)) PGrad(n, 0).array() += take_a.select(n.grad.array(), 0.0);
    if (Wants(n, 1)) PGrad(n, 1).array() += take_a.select(0.0, n.grad.array());
  });
}

Var Huber(const Var& a, double delta) {
  const auto x = a.value().array();
  Matrix y = (x.abs() <= delta).select(0.5 * x.square(), delta * (x.abs() - 0.5 * delta));
  return MakeResult(std::move(y), {a}, [delta](Node& n) {
    PGrad(n, 0).array() += n.grad.array() * PVal(n, 0).array().max(-delta).min(delta);
  });
}

Var Rows(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || start + count > a.rows()) throw std::out_of_range("Rows: range");
  return MakeResult(a.value().middleRows(start, count), {a}, [start, count](Node& n) {
    PGrad(n, 0).middleRows(start, count) += n.grad;
  });
}

Var Cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || start + count > a.cols()) throw std::out_of_range("Cols: range");
  return MakeResult(a.value().middleCols(start, count), {a}, [start, count](Node& n) {
    PGrad(n, 0).middleCols(start, count) += n.grad;
  });
}

Var VCat(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("VCat: empty");
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts.front().cols();
  for (const auto& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("VCat: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const auto& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return MakeResult(std::move(out), parts, [](Node& n) {
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const Eigen::Index h = n.parents[i]->value.rows();
      if (Wants(n, i)) PGrad(n, i) += n.grad.middleRows(r, h);
      r += h;
    }
  });
}

Var HCat(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("HCat: empty");
  Eigen::Index cols = 0;
  const Eigen::Index rows = parts.front().rows();
  for (const auto& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("HCat: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return MakeResult(std::move(out), parts, [](Node& n) {
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const Eigen::Index w = n.parents[i]->value.cols();
      if (Wants(n, i)) PGrad(n, i) += n.grad.middleCols(c, w);
      c += w;
    }
  });
}

Var RepeatCols(const Var& a, Eigen::Index times) {
  return MakeResult(a.value().replicate(1, times), {a}, [times](Node& n) {
    const Eigen::Index w = PVal(n, 0).cols();
    Matrix& g = PGrad(n, 0);
    for (Eigen::Index k = 0; k < times; ++k) g += n.grad.middleCols(k * w, w);
  });
}

Var Sum(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return MakeResult(std::move(out), {a}, [](Node& n) { PGrad(n, 0).array() += n.grad(0, 0); });
}

Var Mean(const Var& a) {
  const double k = 1.0 / static_cast<double>(a.value().size());
  return Scale(Sum(a), k);
}

Var BlockColSum(const Var& a, Eigen::Index block) {
  if (block <= 0 || a.cols() % block != 0) throw std::invalid_argument("BlockColSum: block");
  const Eigen::Index blocks = a.cols() / block;
  Matrix out(a.rows(), blocks);
  for (Eigen::Index k = 0; k < blocks; ++k) {
    out.col(k) = a.value().middleCols(k * block, block).rowwise().sum();
  }
  return MakeResult(std::move(out), {a}, [block, blocks](Node& n) {
    Matrix& g = PGrad(n, 0);
    for (Eigen::Index k = 0; k < blocks; ++k) g.middleCols(k * block, block).colwise() += n.grad.col(k);
  });
}

Var SumRows(const Var& a) {
  return MakeResult(a.value().colwise().sum(), {a}, [](Node& n) {
    PGrad(n, 0).rowwise() += n.grad.row(0);
  });
}

Var SumCols(const Var& a) {
  return MakeResult(a.value().rowwise().sum(), {a}, [](Node& n) {
    PGrad(n, 0).colwise() += n.grad.col(0);
  });
}

Var LogSoftmax(const Var& a) {
  const Matrix& x = a.value();
  Eigen::RowVectorXd mx = x.colwise().maxCoeff();
  Matrix shifted = x.rowwise() - mx;
  Eigen::RowVectorXd lse = shifted.array().exp().colwise().sum().log().matrix();
  Matrix y = shifted.rowwise() - lse;
  return MakeResult(std::move(y), {a}, [](Node& n) {
    // dx = g - softmax * sum(g)
    Matrix p = n.value.array().exp().matrix();
    Eigen::RowVectorXd gs = n.grad.colwise().sum();
    PGrad(n, 0) += n.grad - (p.array().rowwise() * gs.array()).matrix();
  });
}

Var Softmax(const Var& a) {
  const Matrix& x = a.value();
  Eigen::RowVectorXd mx = x.colwise().maxCoeff();
  Matrix e = (x.rowwise() - mx).array().exp().matrix();
  Eigen::RowVectorXd s = e.colwise().sum();
  Matrix y = e.array().rowwise() / s.array();
  return MakeResult(std::move(y), {a}, [](Node& n) {
    // dx = p * (g - sum(g * p))
    Eigen::RowVectorXd dot = n.grad.cwiseProduct(n.value).colwise().sum();
    PGrad(n, 0).array() += n.value.array() * (n.grad.rowwise() - dot).array();
  });
}

Var PairAdd(const Var& a, const Var& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("PairAdd: row mismatch");
  const Eigen::Index count_a = a.cols();
  const Eigen::Index count_b = b.cols();
  Matrix out(a.rows(), count_a * count_b);
  for (Eigen::Index t = 0; t < count_b; ++t) {
    out.middleCols(t * count_a, count_a) = a.value().colwise() + b.value().col(t);
  }
  return MakeResult(std::move(out), {a, b}, [count_a, count_b](Node& n) {
    for (Eigen::Index t = 0; t < count_b; ++t) {
      auto block = n.grad.middleCols(t * count_a, count_a);
      if (Wants(n, 0)) PGrad(n, 0) += block;
      if (Wants(n, 1)) PGrad(n, 1).col(t) += block.rowwise().sum();
    }
  });
}

Matrix ArgmaxOneHot(const Matrix& m) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < m.rows(); ++i) {
      if (m(i, j) > m(best, j)) best = i;
    }
    out(best, j) = 1.0;
  }
  return out;
}

Var StraightThroughOneHot(const Var& soft) {
  return MakeResult(ArgmaxOneHot(soft.value()), {soft}, [](Node& n) { PGrad(n, 0) += n.grad; });
}

}  // namespace taskclust::ad
