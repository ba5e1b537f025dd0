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
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>

#include "taskclust/trajectory_store.hpp"
#include "temp_dir.hpp"

using taskclust::TrajectoryStore;
using taskclust::TrialRecord;

namespace {

TrialRecord MakeRecord(int id, std::size_t length) {
  TrialRecord r;
  r.task_id = id;
  r.cluster_id = id % 4;
  r.transitions.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    r.transitions[i].reward = -static_cast<double>(id) - 0.01 * static_cast<double>(i);
    r.transitions[i].next_state = taskclust::Vec2(0.1 * id, 0.2 * static_cast<double>(i));
  }
  return r;
}

using taskclust::testing::TempDir;

}  // namespace

TEST_CASE("insert into an empty store") {
  TrajectoryStore store(3, 4);
  store.Insert(MakeRecord(0, 4));
  CHECK(store.size() == 1);
}

TEST_CASE("FIFO eviction beyond capacity") {
  TrajectoryStore store(3, 4);
  for (int i = 0; i < 4; ++i) store.Insert(MakeRecord(i, 4));
  CHECK(store.size() == 3);
  CHECK(store.records().front()->task_id == 1);
  for (const auto& r : store.SampleBatch(500, 3)) CHECK(r->task_id != 0);
}

TEST_CASE("malformed records are rejected") {
  TrajectoryStore store(3, 4);
  CHECK_THROWS_AS(store.Insert(MakeRecord(0, 5)), taskclust::MalformedRecord);
  TrialRecord bad = MakeRecord(0, 4);
  bad.transitions[2].reward = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(store.Insert(bad), taskclust::MalformedRecord);
  CHECK(store.empty());
}

TEST_CASE("sampling") {
  TrajectoryStore store(10, 2);
  CHECK_THROWS_AS(store.SampleBatch(1, 0), std::logic_error);
  store.Insert(MakeRecord(5, 2));
  CHECK(store.SampleBatch(1, 0).front()->task_id == 5);

  store.Insert(MakeRecord(6, 2));
  const auto draws = store.SampleBatch(100000, 12);
  int fives = 0;
  for (const auto& r : draws) fives += r->task_id == 5;
  CHECK(std::abs(fives / 1e5 - 0.5) < 0.01);

  const auto a = store.SampleBatch(20, 99);
  const auto b = store.SampleBatch(20, 99);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("spill file round trip") {
  TrajectoryStore store(5, 3);
  for (int i = 0; i < 7; ++i) store.Insert(MakeRecord(i, 3));
  const auto path = (TempDir() / "store.jsonl").string();
  store.Save(path);
  const TrajectoryStore loaded = TrajectoryStore::Load(path, 5, 3);
  REQUIRE(loaded.size() == store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& x = *store.records()[i];
    const auto& y = *loaded.records()[i];
    CHECK(x.task_id == y.task_id);
    CHECK(x.cluster_id == y.cluster_id);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(x.transitions[k].reward == y.transitions[k].reward);
      CHECK(x.transitions[k].next_state == y.transitions[k].next_state);
    }
  }
}
