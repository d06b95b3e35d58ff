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

#ifndef MOTORID_GRADCHECK_H_
#define MOTORID_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "motorid/dataset.h"
#include "motorid/dynamics.h"
#include "motorid/gradients.h"
#include "motorid/integrators.h"

namespace motorid {

// Seeded (params, segment) pairs comparing TotalLossGrad against
// FiniteDiffGrad with Ridders extrapolation. Pair i uses integrator i % 3.
struct GradCheckSpec {
  int pairs = 20;
  std::uint64_t seed = 0;
  // Initial Ridders step, relative to max(1, |x_i|).
  double step = 1e-2;
  int segment_steps = 4;
  // Targets are the model's own rollout, so loss and gradient are zero.
  bool zero_residual = false;
  // Attach a random head; hidden == 0 disables it.
  int hidden = 0;
  // Gaussian noise added to the targets, rad and rad / s.
  double target_noise = 1e-3;
  GradientTolerance tolerance;
  friend bool operator==(const GradCheckSpec&, const GradCheckSpec&) = default;
};

void Validate(const GradCheckSpec& spec);

struct GradCheckPair {
  int index = 0;
  IntegratorKind integrator = IntegratorKind::kEuler;
  MotorParams params;
  double loss = 0.0;
  GradientCheck check;
};

struct GradCheckReport {
  std::vector<GradCheckPair> pairs;
  double max_relative_error = 0.0;
  bool pass = true;
};

// Draws one pair. Exposed so tests can inspect the scenarios.
std::pair<MotorParams, Segment> SampleGradCheckPair(const GradCheckSpec& spec,
                                                    const PlantConfig& cfg,
                                                    int index);

// `tamper`, when set, edits each analytic gradient before comparison. It
// exists for negative-control tests.
GradCheckReport RunGradCheck(
    const GradCheckSpec& spec, const PlantConfig& cfg,
    const std::function<void(ParamGradient&)>& tamper = {});

}  // namespace motorid

#endif  // MOTORID_GRADCHECK_H_
