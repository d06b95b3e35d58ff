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

#include <vector>

#include <benchmark/benchmark.h>

#include "motorid/dataset.h"
#include "motorid/dynamics.h"
#include "motorid/excitation.h"
#include "motorid/gradients.h"
#include "motorid/integrators.h"
#include "motorid/neural_friction.h"

namespace motorid {
namespace {

const MotorParams kParams{0.01, 0.1, 0.05, std::nullopt};

MotorParams NeuralParams() {
  MotorParams p = kParams;
  p.neural_friction = NeuralFrictionHead::Random(0);
  return p;
}

// 10 s of default excitation cut into 4-step segments.
const SegmentBatch& Batch() {
  static const SegmentBatch batch = [] {
    const PlantConfig cfg;
    FourierSpec spec;
    spec.duration = 10.0;
    SyntheticTwinSpec twin;
    const TrajectoryDataset data =
        SimulateTwin(IntegrateToAngles(spec, 0.0, cfg.delta), {0.0, 0.0}, twin, cfg);
    return SegmentDataset(Resample(data, cfg.delta), 4);
  }();
  return batch;
}

void BM_Step(benchmark::State& state) {
  const auto kind = static_cast<IntegratorKind>(state.range(0));
  const PlantConfig cfg;
  JointState s{0.3, -0.2};
  for (auto _ : state) {
    s = Step(s, {0.1}, kParams, cfg, kind);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step)->DenseRange(0, 2)->ArgName("integrator");

void BM_SegmentLossGrad(benchmark::State& state) {
  const auto kind = static_cast<IntegratorKind>(state.range(0));
  const MotorParams params = state.range(1) ? NeuralParams() : kParams;
  const PlantConfig cfg;
  const Segment& segment = Batch().segments.front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(SegmentLossGrad(segment, params, cfg, kind));
  }
}
BENCHMARK(BM_SegmentLossGrad)->ArgsProduct({{0, 1, 2}, {0, 1}})->ArgNames({"integrator", "neural"});

void BM_TotalLossGrad(benchmark::State& state) {
  const auto kind = static_cast<IntegratorKind>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  const PlantConfig cfg;
  const SegmentBatch& batch = Batch();
  for (auto _ : state) {
    benchmark::DoNotOptimize(TotalLossGrad(batch.segments, kParams, cfg, kind, threads));
  }
  state.SetItemsProcessed(state.iterations() * batch.segments.size());
}
BENCHMARK(BM_TotalLossGrad)
    ->ArgsProduct({{0, 2}, {1, 4}})
    ->ArgNames({"integrator", "threads"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace
}  // namespace motorid

BENCHMARK_MAIN();
