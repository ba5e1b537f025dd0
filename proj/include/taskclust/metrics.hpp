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


#ifndef TASKCLUST_METRICS_HPP_
#define TASKCLUST_METRICS_HPP_

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace taskclust {

inline constexpr int kMetricsSchemaVersion = 1;

// One line of the metric log, written at every evaluation point.
struct MetricRecord {
  long iteration = 0;
  long frames = 0;
  // Mean held-out return of each episode of the trial (ep1, ep2, ...).
  std::vector<double> test_returns;
  // NMI at the end of the exploration episode, and averaged over its steps.
  double nmi = 0.0;
  double nmi_mean = 0.0;
  // Mean training returns per episode since the previous record.
  std::vector<double> train_returns;
  // Averaged loss diagnostics since the previous record.
  std::map<std::string, double> losses;
  std::string fingerprint;

  // Set by the reader when a numeric field was stored as null (NaN).
  bool has_nan = false;

  bool operator==(const MetricRecord& other) const;
};

std::string SerializeMetricRecord(const MetricRecord& record);
// Throws std::invalid_argument on malformed input.
MetricRecord ParseMetricRecord(const std::string& line);

// Append-only writer; each record is flushed as one line.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path, bool truncate = true);
  void Write(const MetricRecord& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

struct MetricsReadResult {
  std::vector<MetricRecord> records;
  int corrupt_lines = 0;
  int nan_records = 0;
};

// Skips corrupt lines with a warning on stderr and counts them. A missing
// file is an error; an empty file yields no records.
MetricsReadResult ReadMetrics(const std::string& path);

}  // namespace taskclust

#endif  // TASKCLUST_METRICS_HPP_
