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
#include <functional>
#include <random>

#include "oracles.hpp"
#include "taskclust/autodiff.hpp"
#include "taskclust/nn.hpp"

namespace ad = taskclust::ad;
using ad::Matrix;
using ad::Var;
using taskclust::nn::ParameterList;
using taskclust::testing::CheckGradient;

namespace {

Matrix RandomMatrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

// Gradient check of f over two random parameters a (m x n) and b.
double OpError(const std::function<Var(const Var&, const Var&)>& f, int m, int n, int bm, int bn,
               double scale = 1.0) {
  std::mt19937_64 rng(17);
  Var a = Var::Parameter(RandomMatrix(m, n, rng, scale));
  Var b = Var::Parameter(RandomMatrix(bm, bn, rng, scale));
  const Matrix w = RandomMatrix(m, n, rng);
  ParameterList params;
  params.Add("a", a);
  params.Add("b", b);
  auto loss = [&] {
    Var y = f(a, b);
    Matrix weights = Matrix::Ones(y.rows(), y.cols());
    if (y.rows() == w.rows() && y.cols() == w.cols()) weights = w;
    return ad::Sum(ad::Mul(y, ad::Constant(weights)));
  };
  return CheckGradient(loss, params).relative_error;
}

}  // namespace

TEST_CASE("elementwise and matrix ops match central differences") {
  CHECK(OpError([](const Var& a, const Var& b) { return ad::MatMul(a, b); }, 3, 4, 4, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return a + b; }, 3, 4, 3, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return a - b; }, 3, 4, 3, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return a * b; }, 3, 4, 3, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return ad::AddColumn(a, b); }, 3, 4, 3, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return ad::MulRow(a, b); }, 3, 4, 1, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Sigmoid(a); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Tanh(a); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Exp(a); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Log(ad::AddScalar(ad::Square(a), 0.5)); },
                3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Huber(a, 0.7); }, 3, 4, 1, 1, 2.0) < 1e-6);
  CHECK(OpError([](const Var& a, const Var& b) { return ad::Minimum(a, b); }, 3, 4, 3, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Softmax(a); }, 4, 3, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::LogSoftmax(a); }, 4, 3, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return ad::PairAdd(a, b); }, 3, 4, 3, 2) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::BlockColSum(a, 2); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::SumRows(a); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::SumCols(a); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::RepeatCols(a, 3); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Rows(a, 1, 2); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Cols(a, 1, 2); }, 3, 4, 1, 1) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return ad::VCat({a, b}); }, 3, 4, 2, 4) < 1e-7);
  CHECK(OpError([](const Var& a, const Var& b) { return ad::HCat({a, b, a}); }, 3, 4, 3, 2) < 1e-7);
  CHECK(OpError([](const Var& a, const Var&) { return ad::Mean(a) * 3.0; }, 3, 4, 1, 1) < 1e-7);
}

TEST_CASE("a node used twice accumulates both gradient paths") {
  Var x = Var::Parameter(Matrix::Constant(1, 1, 3.0));
  Var y = ad::Sum(x * x + x);
  ad::Backward(y);
  CHECK(x.grad()(0, 0) == doctest::Approx(7.0));
}

TEST_CASE("clamp passes gradient only inside the interval") {
  Var x = Var::Parameter((Matrix(1, 3) << -2.0, 0.5, 3.0).finished());
  ad::Backward(ad::Sum(ad::Clamp(x, -1.0, 1.0)));
  CHECK(x.grad()(0, 0) == 0.0);
  CHECK(x.grad()(0, 1) == 1.0);
  CHECK(x.grad()(0, 2) == 0.0);
}

TEST_CASE("stop gradient and no-grad guard cut the graph") {
  Var x = Var::Parameter(Matrix::Constant(2, 2, 1.5));
  ad::Backward(ad::Sum(ad::StopGradient(x) * x));
  CHECK(x.grad()(0, 0) == doctest::Approx(1.5));
  {
    ad::NoGradGuard guard;
    CHECK_FALSE(ad::GradEnabled());
    Var y = x * x;
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(ad::GradEnabled());
}

TEST_CASE("straight-through one-hot: hard forward, identity backward") {
  Var s = Var::Parameter((Matrix(3, 2) << 0.2, 0.5, 0.7, 0.5, 0.1, 0.0).finished());
  Var h = ad::StraightThroughOneHot(s);
  CHECK(h.value()(1, 0) == 1.0);
  CHECK(h.value().col(0).sum() == 1.0);
  // Tie between rows 0 and 1 of column 1: lowest index wins.
  CHECK(h.value()(0, 1) == 1.0);
  CHECK(h.value()(1, 1) == 0.0);
  const Matrix w = (Matrix(3, 2) << 1, 2, 3, 4, 5, 6).finished();
  ad::Backward(ad::Sum(h * ad::Constant(w)));
  CHECK((s.grad() - w).norm() == 0.0);
}

TEST_CASE("argmax one-hot breaks ties toward the lowest index") {
  const Matrix m = Matrix::Zero(4, 3);
  const Matrix oh = ad::ArgmaxOneHot(m);
  for (int j = 0; j < 3; ++j) {
    CHECK(oh(0, j) == 1.0);
    CHECK(oh.col(j).sum() == 1.0);
  }
}

TEST_CASE("backward requires a scalar output") {
  Var x = Var::Parameter(Matrix::Ones(2, 2));
  CHECK_THROWS(ad::Backward(x * x));
}
