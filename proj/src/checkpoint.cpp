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


#include "taskclust/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace taskclust {

using nlohmann::json;

json MatrixToJson(const Eigen::MatrixXd& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("matrix data does not match its shape");
  }
  return Eigen::Map<const Eigen::MatrixXd>(data.data(), rows, cols);
}

json ParametersToJson(const nn::ParameterList& params) {
  json j = json::object();
  for (const auto& [name, var] : params.items()) j[name] = MatrixToJson(var.value());
  return j;
}

void ParametersFromJson(const json& j, const nn::ParameterList& params) {
  if (j.size() != params.size()) {
    throw std::runtime_error("checkpoint has " + std::to_string(j.size()) + " tensors, model has " +
                             std::to_string(params.size()));
  }
  for (const auto& [name, var] : params.items()) {
    if (!j.contains(name)) throw std::runtime_error("checkpoint is missing tensor " + name);
    Eigen::MatrixXd m = MatrixFromJson(j.at(name));
    if (m.rows() != var.rows() || m.cols() != var.cols()) {
      throw std::runtime_error("shape mismatch for tensor " + name);
    }
    Var v = var;
    v.mutable_value() = std::move(m);
  }
}

json AdamToJson(const nn::Adam& adam) {
  json m = json::array();
  json v = json::array();
  for (const auto& x : adam.first_moments()) m.push_back(MatrixToJson(x));
  for (const auto& x : adam.second_moments()) v.push_back(MatrixToJson(x));
  return {{"step", adam.step_count()}, {"m", m}, {"v", v}};
}

void AdamFromJson(const json& j, nn::Adam& adam) {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  for (const auto& x : j.at("m")) m.push_back(MatrixFromJson(x));
  for (const auto& x : j.at("v")) v.push_back(MatrixFromJson(x));
  adam.SetState(j.at("step").get<long>(), std::move(m), std::move(v));
}

json MomentsToJson(const RunningMoments& m) {
  return {{"count", m.count()}, {"mean", m.mean()}, {"m2", m.m2()}};
}

RunningMoments MomentsFromJson(const json& j) {
  RunningMoments m;
  m.SetState(j.at("count").get<long>(), j.at("mean").get<double>(), j.at("m2").get<double>());
  return m;
}

json NormalizerToJson(const FeatureNormalizer& n) {
  return {{"count", n.count()},
          {"mean", std::vector<double>(n.mean().data(), n.mean().data() + n.mean().size())},
          {"m2", std::vector<double>(n.m2().data(), n.m2().data() + n.m2().size())}};
}

void NormalizerFromJson(const json& j, FeatureNormalizer& n) {
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto m2 = j.at("m2").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(mean.size()) != n.mean().size() || m2.size() != mean.size()) {
    throw std::runtime_error("input normaliser has the wrong dimension");
  }
  n.SetState(j.at("count").get<double>(), Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size()),
             Eigen::Map<const Eigen::VectorXd>(m2.data(), m2.size()));
}

void WriteJsonFile(const std::string& path, const json& j, int indent) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << j.dump(indent) << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move checkpoint into place at " + path);
  }
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace taskclust
