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

#include "motorid/integrators.h"

#include <cmath>
#include <sstream>
#include <string>

#include "motorid/errors.h"

namespace motorid {

std::string_view ToString(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::kEuler:
      return "euler";
    case IntegratorKind::kSemiImplicitEuler:
      return "semi_implicit_euler";
    case IntegratorKind::kRk4:
      return "rk4";
  }
  return "unknown";
}

IntegratorKind ParseIntegratorKind(std::string_view name) {
  if (name == "euler") return IntegratorKind::kEuler;
  if (name == "semi_implicit_euler") return IntegratorKind::kSemiImplicitEuler;
  if (name == "rk4") return IntegratorKind::kRk4;
  throw ConfigError("unknown integrator '" + std::string(name) + "'");
}

Rk4Stages ComputeRk4Stages(const JointState& state, const Action& action,
                           const MotorParams& params, const PlantConfig& cfg) {
  const double h = cfg.delta;
  Rk4Stages out;
  out.pd_torque = PdTorque(state, action, cfg);
  auto accel = [&](const JointState& x) {
    return cfg.hold_pd_torque ? AccelWithPdTorque(x, out.pd_torque, params, cfg)
                              : Accel(x, action, params, cfg);
  };
  out.stage[0] = state;
  out.accel[0] = accel(out.stage[0]);
  out.stage[1] = {state.q + 0.5 * h * out.stage[0].v,
                  state.v + 0.5 * h * out.accel[0]};
  out.accel[1] = accel(out.stage[1]);
  out.stage[2] = {state.q + 0.5 * h * out.stage[1].v,
                  state.v + 0.5 * h * out.accel[1]};
  out.accel[2] = accel(out.stage[2]);
  out.stage[3] = {state.q + h * out.stage[2].v, state.v + h * out.accel[2]};
  out.accel[3] = accel(out.stage[3]);
  return out;
}

JointState Step(const JointState& state, const Action& action,
                const MotorParams& params, const PlantConfig& cfg,
                IntegratorKind kind) {
  const double h = cfg.delta;
  JointState next;
  switch (kind) {
    case IntegratorKind::kEuler: {
      const double a = Accel(state, action, params, cfg);
      next = {state.q + h * state.v, state.v + h * a};
      break;
    }
    case IntegratorKind::kSemiImplicitEuler: {
      const double a = Accel(state, action, params, cfg);
      const double v = state.v + h * a;
      next = {state.q + h * v, v};
      break;
    }
    case IntegratorKind::kRk4: {
      const Rk4Stages s = ComputeRk4Stages(state, action, params, cfg);
      next.q = state.q + h / 6.0 *
                             (s.stage[0].v + 2.0 * s.stage[1].v +
                              2.0 * s.stage[2].v + s.stage[3].v);
      next.v = state.v + h / 6.0 *
                             (s.accel[0] + 2.0 * s.accel[1] +
                              2.0 * s.accel[2] + s.accel[3]);
      break;
    }
  }
  if (!std::isfinite(next.q) || !std::isfinite(next.v)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << ToString(kind) << " step diverged from q=" << state.q
        << " v=" << state.v << " q_des=" << action.q_des
        << " (armature=" << params.armature << " damping=" << params.damping
        << " frictionloss=" << params.frictionloss << ")";
    throw DivergenceError(msg.str());
  }
  return next;
}

Rollout RollOut(const JointState& initial, std::span<const Action> actions,
                const MotorParams& params, const PlantConfig& cfg,
                IntegratorKind kind) {
  if (actions.empty()) throw ConfigError("rollout needs at least one action");
  Validate(cfg);
  Validate(params);
  Rollout out;
  out.actions.assign(actions.begin(), actions.end());
  out.states.reserve(actions.size() + 1);
  out.states.push_back(initial);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    try {
      out.states.push_back(Step(out.states.back(), actions[i], params, cfg, kind));
    } catch (const DivergenceError& e) {
      throw DivergenceError("rollout step " + std::to_string(i) + ": " + e.what(),
                            i);
    }
  }
  return out;
}

}  // namespace motorid
