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

#include "motorid/dynamics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "motorid/errors.h"

namespace motorid {
namespace {

void RequireFinite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be finite");
  }
}

void RequireArmature(const MotorParams& params) {
  if (!(params.armature >= kArmatureFloor)) {
    throw ConfigError("armature " + std::to_string(params.armature) +
                      " is below the floor " + std::to_string(kArmatureFloor));
  }
}

}  // namespace

void Validate(const PlantConfig& cfg) {
  RequireFinite(cfg.rod_mass, "rod_mass");
  RequireFinite(cfg.rod_length, "rod_length");
  RequireFinite(cfg.gravity, "gravity");
  RequireFinite(cfg.kp, "kp");
  RequireFinite(cfg.kd, "kd");
  RequireFinite(cfg.friction_smoothing_velocity, "friction_smoothing_velocity");
  RequireFinite(cfg.delta, "delta");
  if (!(cfg.rod_mass > 0.0)) throw ConfigError("rod_mass must be positive");
  if (!(cfg.rod_length > 0.0)) throw ConfigError("rod_length must be positive");
  if (!(cfg.kp >= 0.0)) throw ConfigError("kp must be non-negative");
  if (!(cfg.kd >= 0.0)) throw ConfigError("kd must be non-negative");
  if (!(cfg.torque_limit > 0.0)) {
    throw ConfigError("torque_limit must be positive (infinity for none)");
  }
  if (!(cfg.friction_smoothing_velocity > 0.0)) {
    throw ConfigError("friction_smoothing_velocity must be positive");
  }
  if (!(cfg.delta > 0.0)) throw ConfigError("delta must be positive");
}

void Validate(const MotorParams& params) {
  RequireFinite(params.armature, "armature");
  RequireFinite(params.damping, "damping");
  RequireFinite(params.frictionloss, "frictionloss");
  RequireArmature(params);
  if (!(params.damping >= 0.0)) throw ConfigError("damping must be >= 0");
  if (!(params.frictionloss >= 0.0)) {
    throw ConfigError("frictionloss must be >= 0");
  }
}

double PdTorque(const JointState& state, const Action& action,
                const PlantConfig& cfg) {
  const double raw = cfg.kp * (action.q_des - state.q) - cfg.kd * state.v;
  return std::clamp(raw, -cfg.torque_limit, cfg.torque_limit);
}

double GravityTorque(double q, const PlantConfig& cfg) {
  return -cfg.rod_mass * cfg.gravity * 0.5 * cfg.rod_length * std::sin(q);
}

double FrictionTorque(double v, const MotorParams& params,
                      const PlantConfig& cfg) {
  return -params.damping * v -
         params.frictionloss * std::tanh(v / cfg.friction_smoothing_velocity);
}

double AccelWithPdTorque(const JointState& state, double pd_torque,
                         const MotorParams& params, const PlantConfig& cfg) {
  RequireArmature(params);
  double torque = pd_torque + GravityTorque(state.q, cfg) +
                  FrictionTorque(state.v, params, cfg);
  if (params.neural_friction) torque += params.neural_friction->Torque(state.v);
  return torque / (cfg.LoadInertia() + params.armature);
}

double Accel(const JointState& state, const Action& action,
             const MotorParams& params, const PlantConfig& cfg) {
  return AccelWithPdTorque(state, PdTorque(state, action, cfg), params, cfg);
}

PdTorqueLinearization LinearizePdTorque(const JointState& state,
                                        const Action& action,
                                        const PlantConfig& cfg) {
  const double raw = cfg.kp * (action.q_des - state.q) - cfg.kd * state.v;
  PdTorqueLinearization out;
  if (raw > cfg.torque_limit) {
    out.torque = cfg.torque_limit;
  } else if (raw < -cfg.torque_limit) {
    out.torque = -cfg.torque_limit;
  } else {
    out.torque = raw;
    out.d_q = -cfg.kp;
    out.d_v = -cfg.kd;
  }
  return out;
}

AccelLinearization LinearizeAccel(const JointState& state, double pd_torque,
                                  const MotorParams& params,
                                  const PlantConfig& cfg) {
  RequireArmature(params);
  const double inertia = cfg.LoadInertia() + params.armature;
  const double inv_inertia = 1.0 / inertia;
  const double v_eps = cfg.friction_smoothing_velocity;
  const double t = std::tanh(state.v / v_eps);
  const double half_weight = cfg.rod_mass * cfg.gravity * 0.5 * cfg.rod_length;

  double torque = pd_torque + GravityTorque(state.q, cfg) +
                  FrictionTorque(state.v, params, cfg);
  double d_torque_dv = -params.damping - params.frictionloss * (1.0 - t * t) / v_eps;
  if (params.neural_friction) {
    torque += params.neural_friction->Torque(state.v);
    d_torque_dv += params.neural_friction->TorqueDerivative(state.v);
  }

  AccelLinearization out;
  out.accel = torque * inv_inertia;
  out.d_q = -half_weight * std::cos(state.q) * inv_inertia;
  out.d_v = d_torque_dv * inv_inertia;
  out.d_pd_torque = inv_inertia;
  out.d_armature = -out.accel * inv_inertia;
  out.d_damping = -state.v * inv_inertia;
  out.d_frictionloss = -t * inv_inertia;
  out.d_neural_scale = inv_inertia;
  return out;
}

}  // namespace motorid
