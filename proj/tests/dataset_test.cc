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

#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "motorid/errors.h"
#include "test_util.h"

namespace motorid {
namespace {

TrajectoryDataset Grid(std::size_t n, double delta) {
  TrajectoryDataset d;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * delta;
    d.timestamps.push_back(t);
    d.states.push_back({std::sin(t), std::cos(t)});
    d.actions.push_back({0.5 * t});
  }
  d.metadata.delta = delta;
  d.metadata.plant_config_hash = "0123456789abcdef";
  d.metadata.generator = {{"source", "test"}};
  return d;
}

TEST(ValidateTest, CatchesMalformedData) {
  TrajectoryDataset d = Grid(5, 0.1);
  EXPECT_NO_THROW(d.Validate());
  d.actions.pop_back();
  EXPECT_THROW(d.Validate(), ConfigError);
  d = Grid(5, 0.1);
  d.timestamps[3] = d.timestamps[2];
  EXPECT_THROW(d.Validate(), ConfigError);
  d = Grid(5, 0.1);
  d.states[1].v = std::nan("");
  EXPECT_THROW(d.Validate(), ConfigError);
}

TEST(ResampleTest, OnGridIsIdentity) {
  const TrajectoryDataset d = Grid(101, 1e-3);
  const TrajectoryDataset r = Resample(d, 1e-3);
  ASSERT_EQ(r.size(), d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    EXPECT_EQ(r.states[k], d.states[k]);
    EXPECT_EQ(r.actions[k], d.actions[k]);
  }
}

TEST(ResampleTest, LinearSignalsInterpolateExactly) {
  TrajectoryDataset d;
  for (double t : {0.0, 0.0013, 0.0031, 0.0042, 0.0067, 0.01}) {
    d.timestamps.push_back(t);
    d.states.push_back({2.0 * t + 1.0, -3.0 * t});
    d.actions.push_back({t});
  }
  const TrajectoryDataset r = Resample(d, 1e-3);
  ASSERT_EQ(r.size(), 11u);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double t = r.timestamps[k];
    EXPECT_NEAR(r.states[k].q, 2.0 * t + 1.0, 1e-14);
    EXPECT_NEAR(r.states[k].v, -3.0 * t, 1e-14);
    EXPECT_NEAR(r.actions[k].q_des, t, 1e-14);
  }
  EXPECT_EQ(r.metadata.delta, 1e-3);
}

TEST(ResampleTest, RejectsBadInput) {
  EXPECT_THROW(Resample(Grid(1, 1e-3), 1e-3), ConfigError);
  EXPECT_THROW(Resample(Grid(5, 1e-3), 0.0), ConfigError);
  EXPECT_THROW(Resample(Grid(5, 1e-3), 1.0), ConfigError);
}

TEST(SegmentTest, SplitsIntoNonOverlappingWindows) {
  const TrajectoryDataset d = Grid(23, 1e-3);
  const SegmentBatch batch = SegmentDataset(d, 4);
  EXPECT_EQ(batch.steps, 4);
  // 22 steps give five complete segments; the remainder is dropped.
  ASSERT_EQ(batch.segments.size(), 5u);
  for (std::size_t j = 0; j < batch.segments.size(); ++j) {
    const Segment& seg = batch.segments[j];
    EXPECT_EQ(seg.begin, 4 * j);
    EXPECT_EQ(seg.initial, d.states[4 * j]);
    ASSERT_EQ(seg.actions.size(), 4u);
    ASSERT_EQ(seg.targets.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(seg.actions[i], d.actions[4 * j + i]);
      EXPECT_EQ(seg.targets[i], d.states[4 * j + i + 1]);
    }
  }
}

TEST(SegmentTest, RejectsIrregularOrShortData) {
  TrajectoryDataset d = Grid(20, 1e-3);
  d.timestamps[7] += 3e-4;
  EXPECT_THROW(SegmentDataset(d, 4), ConfigError);
  EXPECT_THROW(SegmentDataset(Grid(4, 1e-3), 4), ConfigError);
  EXPECT_THROW(SegmentDataset(Grid(20, 1e-3), 0), ConfigError);
}

TEST(SplitTest, LeadingFractionTrains) {
  const TrajectoryDataset d = Grid(10, 1e-3);
  const auto [train, test] = Split(d, 0.8);
  EXPECT_EQ(train.size(), 8u);
  EXPECT_EQ(test.size(), 2u);
  EXPECT_EQ(test.timestamps.front(), d.timestamps[8]);
  EXPECT_EQ(train.metadata, d.metadata);
  EXPECT_THROW(Split(d, 0.0), ConfigError);
  EXPECT_THROW(Split(d, 1.0), ConfigError);
  EXPECT_THROW(Split(d, 0.01), ConfigError);
}

TEST(SplitTest, SixtySecondsAtMillisecond) {
  const auto [train, test] = Split(Grid(60001, 1e-3), 0.8);
  EXPECT_EQ(train.size(), 48000u);
  EXPECT_EQ(test.size(), 12001u);
}

TEST(SerializationTest, RoundTripsExactly) {
  TrajectoryDataset d = Grid(50, 1e-3);
  d.states[3].q = 0.1 + 0.2;  // not representable in short decimal form
  d.metadata.hidden_ground_truth = MotorParams{0.01, 0.1, 0.05, std::nullopt};
  std::stringstream buffer;
  WriteDataset(d, buffer);
  EXPECT_NE(buffer.str().find("\"hidden_from_fitter\":true"), std::string::npos);
  const TrajectoryDataset back = ReadDataset(buffer);
  EXPECT_EQ(back, d);
}

TEST(SerializationTest, FileRoundTrip) {
  const testing::ScratchDir dir("dataset");
  const TrajectoryDataset d = Grid(20, 1e-3);
  WriteDatasetFile(d, dir / "d.csv");
  EXPECT_EQ(ReadDatasetFile(dir / "d.csv"), d);
  EXPECT_THROW(ReadDatasetFile(dir / "missing.csv"), ConfigError);
}

TEST(SerializationTest, RejectsMalformedInput) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return ReadDataset(in);
  };
  EXPECT_THROW(read(""), ConfigError);
  EXPECT_THROW(read("not json\n"), ConfigError);
  EXPECT_THROW(read("{\"format\":\"other\"}\n"), ConfigError);

  std::stringstream good;
  WriteDataset(Grid(3, 1e-3), good);
  std::string text = good.str();
  EXPECT_NO_THROW(read(text));
  EXPECT_THROW(read(text + "0.1,0.2\n"), ConfigError);
  EXPECT_THROW(read(text + "0.004,abc,0,0\n"), ConfigError);
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(std::stod(FormatDouble(0.1 + 0.2)), 0.1 + 0.2);
  EXPECT_EQ(FormatDouble(1e-8), "1e-08");
}

}  // namespace
}  // namespace motorid
