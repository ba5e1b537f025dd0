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

#ifndef TASKCLUST_TRAJECTORY_STORE_HPP_
#define TASKCLUST_TRAJECTORY_STORE_HPP_

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "taskclust/environments.hpp"

namespace taskclust {

struct TrialRecord {
  int task_id = 0;
  int cluster_id = 0;
  // tau^+ over (N + 1) * H steps.
  Trajectory transitions;
  long insertion_epoch = 0;
};

class MalformedRecord : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// FIFO ring of completed trials with uniform sampling with replacement.
// Records are immutable once inserted and shared with sampled batches.
class TrajectoryStore {
 public:
  TrajectoryStore(std::size_t capacity, std::size_t trial_length);

  // Throws MalformedRecord if the transition count differs from
  // trial_length or a value is not finite.
  void Insert(TrialRecord record);

  // n uniform draws with replacement; throws std::logic_error when empty.
  std::vector<std::shared_ptr<const TrialRecord>> SampleBatch(std::size_t n,
                                                              std::uint64_t seed) const;

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t trial_length() const { return trial_length_; }
  bool empty() const { return records_.empty(); }
  const std::deque<std::shared_ptr<const TrialRecord>>& records() const { return records_; }

  // Line-delimited spill file: one JSON record per trial, oldest first.
  void Save(const std::string& path) const;
  static TrajectoryStore Load(const std::string& path, std::size_t capacity,
                              std::size_t trial_length);

 private:
  std::size_t capacity_;
  std::size_t trial_length_;
  std::deque<std::shared_ptr<const TrialRecord>> records_;
};

}  // namespace taskclust

#endif  // TASKCLUST_TRAJECTORY_STORE_HPP_
