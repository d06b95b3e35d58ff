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

#include "motorid/excitation.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "motorid/errors.h"
#include "motorid/integrators.h"
#include "motorid/json_io.h"
#include "motorid/random.h"

namespace motorid {
namespace {

void RequireRange(double lo, double hi, const char* name) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw ConfigError(std::string(name) + " range must satisfy min <= max");
  }
}

// RK4 over [0, h] with the PD torque frozen at `torque`.
JointState Rk4WithTorque(const JointState& x, double torque, double h,
                         const MotorParams& params, const PlantConfig& cfg) {
  auto accel = [&](const JointState& s) {
    return AccelWithPdTorque(s, torque, params, cfg);
  };
  const double a1 = accel(x);
  const JointState x2{x.q + 0.5 * h * x.v, x.v + 0.5 * h * a1};
  const double a2 = accel(x2);
  const JointState x3{x.q + 0.5 * h * x2.v, x.v + 0.5 * h * a2};
  const double a3 = accel(x3);
  const JointState x4{x.q + h * x3.v, x.v + h * a3};
  const double a4 = accel(x4);
  return {x.q + h / 6.0 * (x.v + 2.0 * x2.v + 2.0 * x3.v + x4.v),
          x.v + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)};
}

}  // namespace

void Validate(const FourierSpec& spec) {
  if (spec.modes.empty()) {
    if (spec.min_modes < 1 || spec.max_modes < spec.min_modes) {
      throw ConfigError("mode count range must satisfy 1 <= min <= max");
    }
    RequireRange(spec.amplitude_min, spec.amplitude_max, "amplitude");
    RequireRange(spec.frequency_min, spec.frequency_max, "frequency");
    RequireRange(spec.phase_min, spec.phase_max, "phase");
  }
  for (const FourierMode& m : spec.modes) {
    if (!std::isfinite(m.amplitude) || !std::isfinite(m.frequency) ||
        !std::isfinite(m.phase)) {
      throw ConfigError("explicit Fourier modes must be finite");
    }
  }
  if (!(spec.v_max > 0.0)) throw ConfigError("v_max must be positive");
  if (!(spec.duration > 0.0) || !std::isfinite(spec.duration)) {
    throw ConfigError("excitation duration must be positive");
  }
  if (!std::isfinite(spec.velocity_offset)) {
    throw ConfigError("velocity_offset must be finite");
  }
}

std::vector<FourierMode> SampleModes(const FourierSpec& spec) {
  Validate(spec);
  if (!spec.modes.empty()) return spec.modes;
  Rng rng(spec.seed);
  const auto count = rng.UniformInt(spec.min_modes, spec.max_modes);
  std::vector<FourierMode> modes(static_cast<std::size_t>(count));
  for (FourierMode& m : modes) {
    m.amplitude = rng.Uniform(spec.amplitude_min, spec.amplitude_max);
    m.frequency = rng.Uniform(spec.frequency_min, spec.frequency_max);
    m.phase = rng.Uniform(spec.phase_min, spec.phase_max);
  }
  return modes;
}

FourierExcitation::FourierExcitation(FourierSpec spec)
    : spec_(std::move(spec)), modes_(SampleModes(spec_)) {}

double FourierExcitation::DesiredVelocity(double t) const {
  if (!(t >= 0.0 && t <= spec_.duration)) {
    throw ConfigError("excitation time " + std::to_string(t) +
                      " outside [0, duration]");
  }
  double v = spec_.velocity_offset;
  for (const FourierMode& m : modes_) {
    v += m.amplitude * std::sin(2.0 * std::numbers::pi * m.frequency * t + m.phase);
  }
  return std::clamp(v, -spec_.v_max, spec_.v_max);
}

std::vector<Action> FourierExcitation::DesiredAngles(double q0, double dt) const {
  if (!(dt > 0.0) || dt > spec_.duration) {
    throw ConfigError("integration step must satisfy 0 < dt <= duration");
  }
  const auto steps =
      static_cast<std::size_t>(std::floor(spec_.duration / dt + 1e-9));
  std::vector<Action> out;
  out.reserve(steps + 1);
  out.push_back({q0});
  double q = q0;
  double v_prev = DesiredVelocity(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, spec_.duration);
    const double v = DesiredVelocity(t);
    q += 0.5 * dt * (v_prev + v);
    out.push_back({q});
    v_prev = v;
  }
  return out;
}

double GenerateDesiredVelocity(const FourierSpec& spec, double t) {
  return FourierExcitation(spec).DesiredVelocity(t);
}

std::vector<Action> IntegrateToAngles(const FourierSpec& spec, double q0,
                                      double dt) {
  return FourierExcitation(spec).DesiredAngles(q0, dt);
}

void Validate(const SyntheticTwinSpec& twin) {
  Validate(twin.true_params);
  if (!(twin.noise_std_q >= 0.0) || !(twin.noise_std_v >= 0.0)) {
    throw ConfigError("twin noise standard deviations must be >= 0");
  }
  if (twin.substeps < 1) throw ConfigError("twin substeps must be >= 1");
}

TrajectoryDataset SimulateTwin(std::span<const Action> actions,
                               const JointState& initial,
                               const SyntheticTwinSpec& twin,
                               const PlantConfig& cfg) {
  Validate(cfg);
  Validate(twin);
  if (actions.empty()) throw ConfigError("twin needs at least one action");

  const MotorParams& truth = twin.true_params;
  const double h = cfg.delta / twin.substeps;
  PlantConfig fine = cfg;
  fine.delta = h;

  TrajectoryDataset data;
  data.timestamps.reserve(actions.size());
  data.states.reserve(actions.size());
  data.actions.assign(actions.begin(), actions.end());

  JointState x = initial;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    data.timestamps.push_back(static_cast<double>(k) * cfg.delta);
    data.states.push_back(x);
    if (k + 1 == actions.size()) break;
    const double held = PdTorque(x, actions[k], cfg);
    for (int s = 0; s < twin.substeps; ++s) {
      x = cfg.hold_pd_torque
              ? Rk4WithTorque(x, held, h, truth, cfg)
              : Step(x, actions[k], truth, fine, IntegratorKind::kRk4);
    }
    if (!std::isfinite(x.q) || !std::isfinite(x.v)) {
      throw DivergenceError(
          "twin diverged after control tick " + std::to_string(k), k);
    }
  }

  if (twin.noise_std_q > 0.0 || twin.noise_std_v > 0.0) {
    Rng rng(twin.noise_seed);
    for (JointState& s : data.states) {
      s.q += twin.noise_std_q * rng.Gaussian();
      s.v += twin.noise_std_v * rng.Gaussian();
    }
  }

  data.metadata.delta = cfg.delta;
  data.metadata.plant_config_hash = PlantConfigHash(cfg);
  data.metadata.generator["twin"] = {
      {"integrator", "rk4"},
      {"substeps", twin.substeps},
      {"noise_std_q", twin.noise_std_q},
      {"noise_std_v", twin.noise_std_v},
      {"noise_seed", twin.noise_seed},
  };
  data.metadata.hidden_ground_truth = truth;
  return data;
}

}  // namespace motorid
