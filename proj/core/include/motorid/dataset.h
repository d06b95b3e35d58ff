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

#ifndef MOTORID_DATASET_H_
#define MOTORID_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "motorid/dynamics.h"

namespace motorid {

inline constexpr int kDatasetSchemaVersion = 1;

struct DatasetMetadata {
  int schema_version = kDatasetSchemaVersion;
  // Grid spacing in seconds; 0 when the samples are not on a uniform grid.
  double delta = 0.0;
  std::string plant_config_hash;
  // Free-form description of how the data was produced.
  nlohmann::json generator = nlohmann::json::object();
  // Parameters of the synthetic twin that produced the data. Kept for scoring
  // only; the fitter never reads it.
  std::optional<MotorParams> hidden_ground_truth;

  friend bool operator==(const DatasetMetadata&,
                         const DatasetMetadata&) = default;
};

// Column store of a recorded trajectory. actions[i] is the command applied
// from timestamps[i] until the next sample.
struct TrajectoryDataset {
  std::vector<double> timestamps;
  std::vector<JointState> states;
  std::vector<Action> actions;
  DatasetMetadata metadata;

  std::size_t size() const { return timestamps.size(); }

  // Throws ConfigError on unequal column lengths, non-increasing timestamps,
  // or non-finite values.
  void Validate() const;

  friend bool operator==(const TrajectoryDataset&,
                         const TrajectoryDataset&) = default;
};

// One window of the segmented objective: the simulation restarts from the
// measured `initial` state and is compared against `targets` after each of
// the `actions`.
struct Segment {
  JointState initial;
  std::vector<Action> actions;
  std::vector<JointState> targets;
  // Index of `initial` in the source dataset.
  std::size_t begin = 0;
};

struct SegmentBatch {
  int steps = 0;
  std::vector<Segment> segments;
};

// Linear interpolation of q, v and q_des onto t0, t0 + delta, ... up to the
// last raw timestamp (no extrapolation). Grid points are t0 + k * delta, so
// data already on that grid passes through unchanged.
TrajectoryDataset Resample(const TrajectoryDataset& raw, double delta);

// Consecutive non-overlapping windows of `steps` transitions; a trailing
// remainder shorter than that is dropped. Requires a uniform time grid.
SegmentBatch SegmentDataset(const TrajectoryDataset& data, int steps);

// Contiguous split: the first floor(train_fraction * size) samples train,
// the rest test.
std::pair<TrajectoryDataset, TrajectoryDataset> Split(
    const TrajectoryDataset& data, double train_fraction);

// Text format: one compact JSON header line, a `t,q,v,q_des` column line, then
// one CSV row per sample with 17 significant digits.
void WriteDataset(const TrajectoryDataset& data, std::ostream& out);
TrajectoryDataset ReadDataset(std::istream& in);
void WriteDatasetFile(const TrajectoryDataset& data,
                      const std::filesystem::path& path);
TrajectoryDataset ReadDatasetFile(const std::filesystem::path& path);

// %.17g rendering via std::to_chars (locale independent).
std::string FormatDouble(double value);

}  // namespace motorid

#endif  // MOTORID_DATASET_H_
