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

#ifndef MOTORID_DYNAMICS_H_
#define MOTORID_DYNAMICS_H_

#include <limits>
#include <optional>

#include "motorid/neural_friction.h"

namespace motorid {

// Joint angle q (rad) and angular velocity v (rad/s). q = 0 hangs straight
// down.
struct JointState {
  double q = 0.0;
  double v = 0.0;

  friend bool operator==(const JointState&, const JointState&) = default;
};

// Desired joint angle sent to the PD controller (rad).
struct Action {
  double q_des = 0.0;

  friend bool operator==(const Action&, const Action&) = default;
};

// Smallest admissible armature (kg m^2); keeps the inertia bounded away from
// the load-only value so the baseline model stays well defined.
inline constexpr double kArmatureFloor = 1e-8;

// Actuator parameters under identification.
struct MotorParams {
  double armature = kArmatureFloor;  // kg m^2
  double damping = 0.0;              // N m s / rad
  double frictionloss = 0.0;         // N m
  // When present, its torque is added to the parametric friction terms.
  std::optional<NeuralFrictionHead> neural_friction;

  // Zero damping and friction loss with minimal armature.
  static MotorParams Baseline() { return MotorParams{}; }

  friend bool operator==(const MotorParams&, const MotorParams&) = default;
};

// Known physical context of the test bench. The load is a uniform rod pivoted
// at one end: inertia m L^2 / 3, centre of mass at L / 2.
struct PlantConfig {
  double rod_mass = 0.3;     // kg
  double rod_length = 1.0;   // m
  double gravity = 9.81;     // m / s^2
  double kp = 20.0;          // N m / rad
  double kd = 1.0;           // N m s / rad
  double torque_limit = std::numeric_limits<double>::infinity();  // N m
  double friction_smoothing_velocity = 1e-3;  // rad / s
  double delta = 1e-3;                        // s
  // The PD law is a digital controller ticking once per `delta`: its torque
  // is computed from the state at the start of a step and held across it.
  // When false the PD torque is re-evaluated at every integrator stage.
  bool hold_pd_torque = true;

  double LoadInertia() const { return rod_mass * rod_length * rod_length / 3.0; }

  friend bool operator==(const PlantConfig&, const PlantConfig&) = default;
};

// Throw ConfigError when an invariant is violated.
void Validate(const PlantConfig& cfg);
void Validate(const MotorParams& params);

// clamp(kp (q_des - q) - kd v, -torque_limit, torque_limit).
double PdTorque(const JointState& state, const Action& action,
                const PlantConfig& cfg);

// -m g (L / 2) sin(q).
double GravityTorque(double q, const PlantConfig& cfg);

// -damping v - frictionloss tanh(v / v_eps). The neural head is not included.
double FrictionTorque(double v, const MotorParams& params,
                      const PlantConfig& cfg);

// Angular acceleration of the joint. Throws ConfigError if the armature is
// below kArmatureFloor.
double Accel(const JointState& state, const Action& action,
             const MotorParams& params, const PlantConfig& cfg);

// Same, with the PD torque supplied by the caller (held-torque stepping).
double AccelWithPdTorque(const JointState& state, double pd_torque,
                         const MotorParams& params, const PlantConfig& cfg);

// PD torque with its partials; zero partials when the clamp is saturated.
struct PdTorqueLinearization {
  double torque = 0.0;
  double d_q = 0.0;
  double d_v = 0.0;
};
PdTorqueLinearization LinearizePdTorque(const JointState& state,
                                        const Action& action,
                                        const PlantConfig& cfg);

// Acceleration at a fixed PD torque together with its partial derivatives.
// d_q and d_v exclude any dependence of the PD torque on the state; callers
// chain that in through d_pd_torque. Derivatives with respect to neural head
// weights are d_neural_scale * d(head torque)/d(weights) and are left to the
// caller to accumulate.
struct AccelLinearization {
  double accel = 0.0;
  double d_q = 0.0;
  double d_v = 0.0;
  double d_pd_torque = 0.0;
  double d_armature = 0.0;
  double d_damping = 0.0;
  double d_frictionloss = 0.0;
  double d_neural_scale = 0.0;
};
AccelLinearization LinearizeAccel(const JointState& state, double pd_torque,
                                  const MotorParams& params,
                                  const PlantConfig& cfg);

}  // namespace motorid

#endif  // MOTORID_DYNAMICS_H_
