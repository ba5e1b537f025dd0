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


#ifndef TASKCLUST_CHECKPOINT_HPP_
#define TASKCLUST_CHECKPOINT_HPP_

#include <string>

#include <json.hpp>

#include "taskclust/nn.hpp"
#include "taskclust/policy.hpp"
#include "taskclust/ppo.hpp"

namespace taskclust {

inline constexpr int kCheckpointFormatVersion = 1;

nlohmann::json MatrixToJson(const Eigen::MatrixXd& m);
Eigen::MatrixXd MatrixFromJson(const nlohmann::json& j);

// Named parameter values; loading checks names and shapes.
nlohmann::json ParametersToJson(const nn::ParameterList& params);
void ParametersFromJson(const nlohmann::json& j, const nn::ParameterList& params);

nlohmann::json AdamToJson(const nn::Adam& adam);
void AdamFromJson(const nlohmann::json& j, nn::Adam& adam);

nlohmann::json MomentsToJson(const RunningMoments& m);
RunningMoments MomentsFromJson(const nlohmann::json& j);

nlohmann::json NormalizerToJson(const FeatureNormalizer& n);
// Checks the dimension against the existing normaliser.
void NormalizerFromJson(const nlohmann::json& j, FeatureNormalizer& n);

// Writes through a temporary file and renames it into place. Throws
// std::runtime_error naming the path on failure.
void WriteJsonFile(const std::string& path, const nlohmann::json& j, int indent = -1);
nlohmann::json ReadJsonFile(const std::string& path);

}  // namespace taskclust

#endif  // TASKCLUST_CHECKPOINT_HPP_
