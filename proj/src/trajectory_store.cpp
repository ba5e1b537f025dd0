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

#include "taskclust/trajectory_store.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "taskclust/random.hpp"

namespace taskclust {
namespace {

bool Finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

}  // namespace

TrajectoryStore::TrajectoryStore(std::size_t capacity, std::size_t trial_length)
    : capacity_(capacity), trial_length_(trial_length) {
  if (capacity_ == 0) throw std::invalid_argument("TrajectoryStore: capacity must be positive");
}

void TrajectoryStore::Insert(TrialRecord record) {
  if (record.transitions.size() != trial_length_) {
    throw MalformedRecord("trial record has " + std::to_string(record.transitions.size()) +
                          " transitions, expected " + std::to_string(trial_length_));
  }
  for (const auto& tr : record.transitions) {
    if (!Finite(tr.state) || !Finite(tr.action) || !Finite(tr.next_state) ||
        !std::isfinite(tr.reward)) {
      throw MalformedRecord("trial record contains a non-finite value");
    }
  }
  records_.push_back(std::make_shared<const TrialRecord>(std::move(record)));
  while (records_.size() > capacity_) records_.pop_front();
}

std::vector<std::shared_ptr<const TrialRecord>> TrajectoryStore::SampleBatch(
    std::size_t n, std::uint64_t seed) const {
  if (records_.empty()) throw std::logic_error("SampleBatch on an empty trajectory store");
  Rng rng(DeriveSeed(seed, {0xb0ff}));
  std::uniform_int_distribution<std::size_t> pick(0, records_.size() - 1);
  std::vector<std::shared_ptr<const TrialRecord>> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) batch.push_back(records_[pick(rng)]);
  return batch;
}

void TrajectoryStore::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory store to " + path);
  for (const auto& rec : records_) {
    nlohmann::json j;
    j["task_id"] = rec->task_id;
    j["cluster_id"] = rec->cluster_id;
    j["insertion_epoch"] = rec->insertion_epoch;
    auto& steps = j["transitions"] = nlohmann::json::array();
    for (const auto& tr : rec->transitions) {
      steps.push_back({tr.state.x(), tr.state.y(), tr.action.x(), tr.action.y(), tr.reward,
                       tr.next_state.x(), tr.next_state.y()});
    }
    out << j.dump() << '\n';
  }
}

TrajectoryStore TrajectoryStore::Load(const std::string& path, std::size_t capacity,
                                      std::size_t trial_length) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trajectory store from " + path);
  TrajectoryStore store(capacity, trial_length);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    TrialRecord rec;
    rec.task_id = j.at("task_id").get<int>();
    rec.cluster_id = j.at("cluster_id").get<int>();
    rec.insertion_epoch = j.at("insertion_epoch").get<long>();
    for (const auto& s : j.at("transitions")) {
      Transition tr;
      tr.state = {s.at(0).get<double>(), s.at(1).get<double>()};
      tr.action = {s.at(2).get<double>(), s.at(3).get<double>()};
      tr.reward = s.at(4).get<double>();
      tr.next_state = {s.at(5).get<double>(), s.at(6).get<double>()};
      rec.transitions.push_back(tr);
    }
    store.Insert(std::move(rec));
  }
  return store;
}

}  // namespace taskclust
