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
#include <random>

#include "oracles.hpp"
#include "taskclust/nn.hpp"

namespace ad = taskclust::ad;
namespace nn = taskclust::nn;
using ad::Matrix;
using ad::Var;

namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("GRU cell matches a scalar re-implementation of its update") {
  std::mt19937_64 rng(3);
  nn::GruCell cell(3, 2, rng);
  std::normal_distribution<double> n;
  Matrix x(3, 1), h(2, 1);
  for (int i = 0; i < 3; ++i) x(i, 0) = n(rng);
  for (int i = 0; i < 2; ++i) h(i, 0) = n(rng);
  const Matrix out = cell(ad::Constant(x), ad::Constant(h)).value();

  const Matrix& wi = cell.w_input.value();
  const Matrix& wh = cell.w_hidden.value();
  const Matrix& bi = cell.b_input.value();
  const Matrix& bh = cell.b_hidden.value();
  const Matrix gi = wi * x + bi;
  const Matrix gh = wh * h + bh;
  for (int k = 0; k < 2; ++k) {
    const double r = Sigmoid(gi(k, 0) + gh(k, 0));
    const double u = Sigmoid(gi(2 + k, 0) + gh(2 + k, 0));
    const double cand = std::tanh(gi(4 + k, 0) + r * gh(4 + k, 0));
    CHECK(out(k, 0) == doctest::Approx((1.0 - u) * cand + u * h(k, 0)).epsilon(1e-12));
  }
}

TEST_CASE("GRU and MLP gradients match central differences") {
  std::mt19937_64 rng(5);
  nn::GruCell cell(3, 4, rng);
  nn::Mlp mlp(4, {5}, 2, rng);
  nn::ParameterList params;
  cell.Register("gru.", params);
  mlp.Register("mlp.", params);
  std::normal_distribution<double> n;
  Matrix x(3, 6);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
  auto loss = [&] {
    Var h = ad::Constant(Matrix::Zero(4, 2));
    for (int t = 0; t < 3; ++t) h = cell(ad::Constant(x.middleCols(2 * t, 2)), h);
    return ad::Sum(ad::Square(mlp(h)));
  };
  CHECK(taskclust::testing::CheckGradient(loss, params).relative_error < 1e-6);
}

TEST_CASE("Adam takes a first step of size lr against the gradient sign") {
  Var p = Var::Parameter((Matrix(2, 1) << 1.0, -1.0).finished());
  nn::ParameterList params;
  params.Add("p", p);
  nn::Adam adam(params, {.learning_rate = 0.1});
  adam.ZeroGrad();
  ad::Backward(ad::Sum(ad::Mul(p, ad::Constant((Matrix(2, 1) << 3.0, -0.5).finished()))));
  adam.Step();
  CHECK(p.value()(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(p.value()(1, 0) == doctest::Approx(-0.9).epsilon(1e-6));
  CHECK(adam.step_count() == 1);
}

TEST_CASE("Adam minimises a quadratic") {
  Var p = Var::Parameter(Matrix::Constant(3, 1, 5.0));
  nn::ParameterList params;
  params.Add("p", p);
  nn::Adam adam(params, {.learning_rate = 0.05});
  for (int i = 0; i < 2000; ++i) {
    adam.ZeroGrad();
    ad::Backward(ad::Sum(ad::Square(ad::AddScalar(p, -1.0))));
    adam.Step();
  }
  CHECK((p.value().array() - 1.0).abs().maxCoeff() < 1e-3);
}

TEST_CASE("gradient clipping bounds the global norm") {
  Var a = Var::Parameter(Matrix::Zero(2, 1));
  Var b = Var::Parameter(Matrix::Zero(1, 1));
  nn::ParameterList params;
  params.Add("a", a);
  params.Add("b", b);
  a.mutable_grad() << 3.0, 0.0;
  b.mutable_grad() << 4.0;
  CHECK(params.ClipGradNorm(1.0) == doctest::Approx(5.0));
  CHECK(params.GradNorm() == doctest::Approx(1.0));
  CHECK(a.grad()(0, 0) == doctest::Approx(0.6));
  // Below the threshold nothing changes.
  CHECK(params.ClipGradNorm(10.0) == doctest::Approx(1.0));
  CHECK(b.grad()(0, 0) == doctest::Approx(0.8));
}

TEST_CASE("flatten and unflatten round-trip") {
  std::mt19937_64 rng(9);
  nn::Mlp mlp(3, {4, 4}, 2, rng);
  nn::ParameterList params;
  mlp.Register("", params);
  const Eigen::VectorXd flat = params.Flatten();
  CHECK(flat.size() == static_cast<Eigen::Index>(params.NumScalars()));
  Eigen::VectorXd changed = flat.array() + 1.0;
  params.Unflatten(changed);
  CHECK((params.Flatten() - changed).norm() == 0.0);
  params.Unflatten(flat);
  CHECK((params.Flatten() - flat).norm() == 0.0);
}
