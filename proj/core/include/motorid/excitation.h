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

#ifndef MOTORID_EXCITATION_H_
#define MOTORID_EXCITATION_H_

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "motorid/dataset.h"
#include "motorid/dynamics.h"

namespace motorid {

struct FourierMode {
  double amplitude = 0.0;  // rad / s
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad

  friend bool operator==(const FourierMode&, const FourierMode&) = default;
};

// Random sum-of-sines desired-velocity profile. Mode count, amplitudes,
// frequencies and phases are drawn uniformly from the ranges below using
// `seed`. A non-empty `modes` list bypasses the sampling.
struct FourierSpec {
  int min_modes = 3;
  int max_modes = 8;
  double amplitude_min = 0.2;  // rad / s
  double amplitude_max = 2.0;
  double frequency_min = 0.1;  // Hz
  double frequency_max = 3.0;
  double phase_min = 0.0;  // rad
  double phase_max = 2.0 * std::numbers::pi;
  double v_max = 4.0;      // clip limit, rad / s
  double duration = 60.0;  // s
  std::uint64_t seed = 0;
  std::vector<FourierMode> modes;
  // Constant added before clipping; zero outside of tests.
  double velocity_offset = 0.0;

  friend bool operator==(const FourierSpec&, const FourierSpec&) = default;
};

void Validate(const FourierSpec& spec);

// The modes used by `spec`: the explicit list if given, else a seeded draw.
std::vector<FourierMode> SampleModes(const FourierSpec& spec);

class FourierExcitation {
 public:
  explicit FourierExcitation(FourierSpec spec);

  const FourierSpec& spec() const { return spec_; }
  const std::vector<FourierMode>& modes() const { return modes_; }

  // clip(offset + sum_k A_k sin(2 pi f_k t + phi_k), -v_max, v_max) for
  // 0 <= t <= duration.
  double DesiredVelocity(double t) const;

  // Cumulative trapezoidal integral of DesiredVelocity on the grid k * dt,
  // offset by q0. Returns floor(duration / dt) + 1 actions.
  std::vector<Action> DesiredAngles(double q0, double dt) const;

 private:
  FourierSpec spec_;
  std::vector<FourierMode> modes_;
};

double GenerateDesiredVelocity(const FourierSpec& spec, double t);
std::vector<Action> IntegrateToAngles(const FourierSpec& spec, double q0,
                                      double dt);

// Stand-in for the physical motor: a model with hidden parameters,
// integrated finer than the fitter does, with sensor noise on the record.
struct SyntheticTwinSpec {
  MotorParams true_params{0.01, 0.1, 0.05, std::nullopt};
  double noise_std_q = 1e-4;  // rad
  double noise_std_v = 1e-3;  // rad / s
  std::uint64_t noise_seed = 1;
  // RK4 substeps per control period.
  int substeps = 10;

  friend bool operator==(const SyntheticTwinSpec&,
                         const SyntheticTwinSpec&) = default;
};

void Validate(const SyntheticTwinSpec& twin);

// Applies `actions` (one per cfg.delta tick, starting at t = 0) to the twin
// from `initial`, records the state at every tick, then adds independent
// Gaussian noise to the recorded q and v. The returned dataset has
// actions.size() samples and carries the true parameters as hidden ground
// truth. Throws DivergenceError if the twin blows up.
TrajectoryDataset SimulateTwin(std::span<const Action> actions,
                               const JointState& initial,
                               const SyntheticTwinSpec& twin,
                               const PlantConfig& cfg);

}  // namespace motorid

#endif  // MOTORID_EXCITATION_H_
