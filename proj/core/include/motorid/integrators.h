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

#ifndef MOTORID_INTEGRATORS_H_
#define MOTORID_INTEGRATORS_H_

#include <span>
#include <string_view>
#include <vector>

#include "motorid/dynamics.h"

namespace motorid {

// Fixed-step schemes for the one-step predictor s' = Phi(s, a, delta).
//   kEuler             q' = q + delta v,  v' = v + delta a(q, v)
//   kSemiImplicitEuler v' = v + delta a(q, v),  q' = q + delta v'
//   kRk4               classical four-stage update of (q, v)
// The action is held constant over the step.
enum class IntegratorKind { kEuler, kSemiImplicitEuler, kRk4 };

std::string_view ToString(IntegratorKind kind);
// Accepts "euler", "semi_implicit_euler", "rk4"; throws ConfigError otherwise.
IntegratorKind ParseIntegratorKind(std::string_view name);

// Intermediate points of one RK4 step. `stage[i]` is the state at which the
// i-th slope is evaluated and `accel[i]` the acceleration there; the velocity
// slope is stage[i].v. `pd_torque` is the held torque (unused when the plant
// re-evaluates PD per stage).
struct Rk4Stages {
  JointState stage[4];
  double accel[4];
  double pd_torque = 0.0;
};
Rk4Stages ComputeRk4Stages(const JointState& state, const Action& action,
                           const MotorParams& params, const PlantConfig& cfg);

// One integration step of length cfg.delta. Throws DivergenceError if the
// result is not finite.
JointState Step(const JointState& state, const Action& action,
                const MotorParams& params, const PlantConfig& cfg,
                IntegratorKind kind);

// states.size() == actions.size() + 1 and states[0] is the initial state.
struct Rollout {
  std::vector<JointState> states;
  std::vector<Action> actions;
};

// Chains Step over `actions`. Validates params and cfg up front. A divergent
// step aborts with a DivergenceError whose index() is the failing step.
Rollout RollOut(const JointState& initial, std::span<const Action> actions,
                const MotorParams& params, const PlantConfig& cfg,
                IntegratorKind kind);

}  // namespace motorid

#endif  // MOTORID_INTEGRATORS_H_
