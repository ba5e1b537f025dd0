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


#ifndef TASKCLUST_TESTS_TEMP_DIR_HPP_
#define TASKCLUST_TESTS_TEMP_DIR_HPP_

#include <cstdlib>
#include <filesystem>
#include <string>

namespace taskclust::testing {

// Scratch directory for tests, optionally with a fresh subdirectory.
inline std::filesystem::path TempDir(const std::string& sub = "") {
  const char* env = std::getenv("TASKCLUST_TEST_TMP");
  std::filesystem::path dir = env ? env : std::filesystem::temp_directory_path() / "taskclust_tests";
  if (!sub.empty()) {
    dir /= sub;
    std::filesystem::remove_all(dir);
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace taskclust::testing

#endif  // TASKCLUST_TESTS_TEMP_DIR_HPP_
