// Copyright 2026 The motorid Authors
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

#include "motorid/dataset.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "motorid/errors.h"
#include "motorid/json_io.h"

namespace motorid {
namespace {

constexpr std::string_view kFormatName = "motorid-trajectory";
constexpr std::string_view kColumnLine = "t,q,v,q_des";

// Relative tolerance on grid spacing when checking uniformity.
constexpr double kGridTolerance = 1e-6;

double ParseDouble(std::string_view text, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("dataset line " + std::to_string(line) +
                      ": cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

double GridSpacing(const TrajectoryDataset& data) {
  if (data.metadata.delta > 0.0) return data.metadata.delta;
  return data.timestamps[1] - data.timestamps[0];
}

void RequireUniformGrid(const TrajectoryDataset& data) {
  const double delta = GridSpacing(data);
  for (std::size_t i = 1; i < data.size(); ++i) {
    const double gap = data.timestamps[i] - data.timestamps[i - 1];
    if (std::abs(gap - delta) > kGridTolerance * delta) {
      throw ConfigError("dataset is not on a uniform grid of spacing " +
                        FormatDouble(delta) + " (gap " + FormatDouble(gap) +
                        " at sample " + std::to_string(i) + ")");
    }
  }
}

TrajectoryDataset Slice(const TrajectoryDataset& data, std::size_t begin,
                        std::size_t end) {
  TrajectoryDataset out;
  out.timestamps.assign(data.timestamps.begin() + begin,
                        data.timestamps.begin() + end);
  out.states.assign(data.states.begin() + begin, data.states.begin() + end);
  out.actions.assign(data.actions.begin() + begin, data.actions.begin() + end);
  out.metadata = data.metadata;
  return out;
}

}  // namespace

std::string FormatDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 17);
  return std::string(buffer, ptr);
}

void TrajectoryDataset::Validate() const {
  if (states.size() != timestamps.size() || actions.size() != timestamps.size()) {
    throw ConfigError("dataset columns have unequal lengths");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (!std::isfinite(timestamps[i]) || !std::isfinite(states[i].q) ||
        !std::isfinite(states[i].v) || !std::isfinite(actions[i].q_des)) {
      throw ConfigError("dataset sample " + std::to_string(i) +
                        " has a non-finite value");
    }
    if (i > 0 && !(timestamps[i] > timestamps[i - 1])) {
      throw ConfigError("dataset timestamps must be strictly increasing (sample " +
                        std::to_string(i) + ")");
    }
  }
}

TrajectoryDataset Resample(const TrajectoryDataset& raw, double delta) {
  raw.Validate();
  if (raw.size() < 2) throw ConfigError("resample needs at least two samples");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ConfigError("resample delta must be positive");
  }
  const double t0 = raw.timestamps.front();
  const double t_end = raw.timestamps.back();
  if (delta > t_end - t0) {
    throw ConfigError("resample delta exceeds the recorded time span");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((t_end - t0) / delta + 1e-9)) + 1;

  TrajectoryDataset out;
  out.metadata = raw.metadata;
  out.metadata.delta = delta;
  out.timestamps.reserve(count);
  out.states.reserve(count);
  out.actions.reserve(count);

  std::size_t j = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * delta;
    while (j + 1 < raw.size() && raw.timestamps[j + 1] <= t) ++j;
    out.timestamps.push_back(t);
    if (j + 1 >= raw.size() || t == raw.timestamps[j]) {
      out.states.push_back(raw.states[j]);
      out.actions.push_back(raw.actions[j]);
      continue;
    }
    const double w =
        (t - raw.timestamps[j]) / (raw.timestamps[j + 1] - raw.timestamps[j]);
    const JointState& a = raw.states[j];
    const JointState& b = raw.states[j + 1];
    out.states.push_back({a.q + w * (b.q - a.q), a.v + w * (b.v - a.v)});
    const double qa = raw.actions[j].q_des;
    const double qb = raw.actions[j + 1].q_des;
    out.actions.push_back({qa + w * (qb - qa)});
  }
  return out;
}

SegmentBatch SegmentDataset(const TrajectoryDataset& data, int steps) {
  if (steps < 1) throw ConfigError("segment length must be at least 1");
  const auto n = static_cast<std::size_t>(steps);
  if (data.size() < n + 1) {
    throw ConfigError("dataset has " + std::to_string(data.size()) +
                      " samples; a segment of " + std::to_string(steps) +
                      " steps needs " + std::to_string(n + 1));
  }
  data.Validate();
  RequireUniformGrid(data);

  SegmentBatch batch;
  batch.steps = steps;
  const std::size_t count = (data.size() - 1) / n;
  batch.segments.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t begin = j * n;
    Segment seg;
    seg.begin = begin;
    seg.initial = data.states[begin];
    seg.actions.assign(data.actions.begin() + begin,
                       data.actions.begin() + begin + n);
    seg.targets.assign(data.states.begin() + begin + 1,
                       data.states.begin() + begin + n + 1);
    batch.segments.push_back(std::move(seg));
  }
  return batch;
}

std::pair<TrajectoryDataset, TrajectoryDataset> Split(
    const TrajectoryDataset& data, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  const auto cut = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(data.size()) + 1e-9));
  if (cut == 0 || cut >= data.size()) {
    throw ConfigError("train fraction " + FormatDouble(train_fraction) +
                      " leaves one side of a " + std::to_string(data.size()) +
                      "-sample dataset empty");
  }
  return {Slice(data, 0, cut), Slice(data, cut, data.size())};
}

void WriteDataset(const TrajectoryDataset& data, std::ostream& out) {
  data.Validate();
  nlohmann::json header;
  header["format"] = kFormatName;
  header["schema_version"] = data.metadata.schema_version;
  header["delta"] = data.metadata.delta;
  header["plant_config_hash"] = data.metadata.plant_config_hash;
  header["generator"] = data.metadata.generator;
  if (data.metadata.hidden_ground_truth) {
    nlohmann::json truth = *data.metadata.hidden_ground_truth;
    truth["hidden_from_fitter"] = true;
    header["hidden_ground_truth"] = truth;
  }
  out << header.dump() << '\n' << kColumnLine << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << FormatDouble(data.timestamps[i]) << ','
        << FormatDouble(data.states[i].q) << ','
        << FormatDouble(data.states[i].v) << ','
        << FormatDouble(data.actions[i].q_des) << '\n';
  }
  if (!out) throw ConfigError("failed to write dataset");
}

TrajectoryDataset ReadDataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dataset header is not JSON: ") + e.what());
  }
  if (header.value("format", std::string()) != kFormatName) {
    throw ConfigError("dataset header does not declare format '" +
                      std::string(kFormatName) + "'");
  }
  TrajectoryDataset data;
  try {
    data.metadata.schema_version = header.at("schema_version").get<int>();
    data.metadata.delta = header.at("delta").get<double>();
    data.metadata.plant_config_hash =
        header.at("plant_config_hash").get<std::string>();
    data.metadata.generator = header.value("generator", nlohmann::json::object());
    if (header.contains("hidden_ground_truth")) {
      data.metadata.hidden_ground_truth =
          header.at("hidden_ground_truth").get<MotorParams>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad dataset header: ") + e.what());
  }
  if (data.metadata.schema_version != kDatasetSchemaVersion) {
    throw ConfigError("unsupported dataset schema version " +
                      std::to_string(data.metadata.schema_version));
  }
  if (!std::getline(in, line) || line != kColumnLine) {
    throw ConfigError("dataset column line must read '" +
                      std::string(kColumnLine) + "'");
  }
  std::size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::string_view rest(line);
    double fields[4];
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = rest.find(',');
      if ((f < 3) == (comma == std::string_view::npos)) {
        throw ConfigError("dataset line " + std::to_string(line_number) +
                          ": expected 4 comma-separated fields");
      }
      fields[f] = ParseDouble(rest.substr(0, comma), line_number);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    data.timestamps.push_back(fields[0]);
    data.states.push_back({fields[1], fields[2]});
    data.actions.push_back({fields[3]});
  }
  data.Validate();
  return data;
}

void WriteDatasetFile(const TrajectoryDataset& data,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  WriteDataset(data, out);
}

TrajectoryDataset ReadDatasetFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  return ReadDataset(in);
}

}  // namespace motorid
