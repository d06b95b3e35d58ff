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

#ifndef MOTORID_SYSID_H_
#define MOTORID_SYSID_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "motorid/dataset.h"
#include "motorid/dynamics.h"
#include "motorid/integrators.h"

namespace motorid {

enum class OptimizerKind { kGradientDescent, kAdam };

std::string_view ToString(OptimizerKind kind);
OptimizerKind ParseOptimizerKind(std::string_view name);

struct LearningRates {
  double armature = 1e-3;
  double damping = 1e-3;
  double frictionloss = 1e-3;
  double neural = 1e-3;

  static LearningRates Uniform(double rate) {
    return {rate, rate, rate, rate};
  }

  friend bool operator==(const LearningRates&, const LearningRates&) = default;
};

struct ParamFloors {
  double armature = kArmatureFloor;
  double damping = 0.0;
  double frictionloss = 0.0;

  friend bool operator==(const ParamFloors&, const ParamFloors&) = default;
};

// Which parameter groups the optimizer may move.
struct TrainableMask {
  bool armature = true;
  bool damping = true;
  bool frictionloss = true;
  bool neural = true;

  friend bool operator==(const TrainableMask&, const TrainableMask&) = default;
};

struct FitConfig {
  MotorParams initial_params = MotorParams::Baseline();
  OptimizerKind optimizer = OptimizerKind::kAdam;
  LearningRates learning_rate;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 500;
  // Segments per update; 0 means full batch.
  int minibatch_size = 0;
  IntegratorKind integrator = IntegratorKind::kEuler;
  std::uint64_t seed = 0;
  ParamFloors param_floors;
  TrainableMask trainable;
  // Steps per segment used when a dataset is segmented for this fit.
  int segment_steps = 4;
  int threads = 1;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

void Validate(const FitConfig& fit);

// Training loss and parametric values before update `epoch` (entry 0 is the
// initial guess, the last entry the parameters after the final update).
struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double armature = 0.0;
  double damping = 0.0;
  double frictionloss = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct FitReport {
  std::vector<EpochRecord> history;
  MotorParams initial_params;
  MotorParams best_params;
  int best_epoch = 0;
  double initial_loss = 0.0;
  double best_loss = 0.0;
  // Not serialized; timing differs run to run.
  double wall_time_seconds = 0.0;

  // 1 - best_loss / initial_loss.
  double LossReduction() const;
};

// Projected first-order descent on the segmented trajectory loss. After each
// update every parameter is clamped to its floor. Returns the parameters with
// the lowest full-batch loss seen. Deterministic for a given config and
// batch; throws DivergenceError naming the epoch if the loss goes
// non-finite.
FitReport Fit(const SegmentBatch& train, const PlantConfig& cfg,
              const FitConfig& fit);

struct ModelTrace {
  // |q_sim - q_data| per test sample; shorter than the test set if the model
  // diverged.
  std::vector<double> abs_q_error;
  std::vector<double> abs_v_error;
  // Full-horizon MSEs; empty when the rollout diverged.
  std::optional<double> mse_q;
  std::optional<double> mse_v;
  std::optional<std::size_t> diverged_at;
};

struct EvalReport {
  std::vector<double> timestamps;
  ModelTrace optimized;
  ModelTrace baseline;
  // baseline mse_q / optimized mse_q. Infinite if only the baseline diverged,
  // zero if only the optimized model did; 1 when both MSEs are zero.
  std::optional<double> mse_ratio;
};

// Open-loop rollout of both models over the whole test set from its first
// recorded state under the recorded actions.
EvalReport Evaluate(const TrajectoryDataset& test, const MotorParams& params,
                    const MotorParams& baseline, const PlantConfig& cfg,
                    IntegratorKind kind);

}  // namespace motorid

#endif  // MOTORID_SYSID_H_
