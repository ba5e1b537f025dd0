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


#include "taskclust/metrics.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace taskclust {

using nlohmann::json;

namespace {

bool SameDouble(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool SameVector(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!SameDouble(a[i], b[i])) return false;
  }
  return true;
}

json Number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double ReadNumber(const json& v, bool& nan) {
  if (v.is_null()) {
    nan = true;
    return std::nan("");
  }
  if (!v.is_number()) throw std::invalid_argument("expected a number");
  return v.get<double>();
}

}  // namespace

bool MetricRecord::operator==(const MetricRecord& o) const {
  if (iteration != o.iteration || frames != o.frames || fingerprint != o.fingerprint) return false;
  if (!SameVector(test_returns, o.test_returns) || !SameVector(train_returns, o.train_returns)) {
    return false;
  }
  if (!SameDouble(nmi, o.nmi) || !SameDouble(nmi_mean, o.nmi_mean)) return false;
  if (losses.size() != o.losses.size()) return false;
  for (const auto& [k, v] : losses) {
    auto it = o.losses.find(k);
    if (it == o.losses.end() || !SameDouble(v, it->second)) return false;
  }
  return true;
}

std::string SerializeMetricRecord(const MetricRecord& r) {
  json j;
  j["schema"] = kMetricsSchemaVersion;
  j["iteration"] = r.iteration;
  j["frames"] = r.frames;
  for (std::size_t e = 0; e < r.test_returns.size(); ++e) {
    j["test_return_ep" + std::to_string(e + 1)] = Number(r.test_returns[e]);
  }
  j["num_episodes"] = r.test_returns.size();
  j["nmi"] = Number(r.nmi);
  j["nmi_mean"] = Number(r.nmi_mean);
  json train = json::array();
  for (double v : r.train_returns) train.push_back(Number(v));
  j["train_returns"] = train;
  json losses = json::object();
  for (const auto& [k, v] : r.losses) losses[k] = Number(v);
  j["losses"] = losses;
  j["fingerprint"] = r.fingerprint;
  return j.dump();
}

MetricRecord ParseMetricRecord(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  try {
    MetricRecord r;
    if (j.at("schema").get<int>() != kMetricsSchemaVersion) {
      throw std::invalid_argument("unsupported metrics schema");
    }
    r.iteration = j.at("iteration").get<long>();
    r.frames = j.at("frames").get<long>();
    const auto episodes = j.at("num_episodes").get<std::size_t>();
    for (std::size_t e = 0; e < episodes; ++e) {
      r.test_returns.push_back(ReadNumber(j.at("test_return_ep" + std::to_string(e + 1)), r.has_nan));
    }
    r.nmi = ReadNumber(j.at("nmi"), r.has_nan);
    r.nmi_mean = ReadNumber(j.at("nmi_mean"), r.has_nan);
    for (const auto& v : j.at("train_returns")) r.train_returns.push_back(ReadNumber(v, r.has_nan));
    for (const auto& [k, v] : j.at("losses").items()) r.losses[k] = ReadNumber(v, r.has_nan);
    r.fingerprint = j.at("fingerprint").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

MetricsWriter::MetricsWriter(const std::string& path, bool truncate)
    : path_(path), out_(path, truncate ? std::ios::trunc : std::ios::app) {
  if (!out_) throw std::runtime_error("cannot open metric log " + path);
}

void MetricsWriter::Write(const MetricRecord& record) {
  out_ << SerializeMetricRecord(record) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("failed writing metric log " + path_);
}

MetricsReadResult ReadMetrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metric log " + path);
  MetricsReadResult result;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      MetricRecord r = ParseMetricRecord(line);
      if (r.has_nan) ++result.nan_records;
      result.records.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      ++result.corrupt_lines;
      std::cerr << "warning: " << path << ":" << number << ": skipping corrupt record ("
                << e.what() << ")\n";
    }
  }
  return result;
}

}  // namespace taskclust
