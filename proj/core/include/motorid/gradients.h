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

#ifndef MOTORID_GRADIENTS_H_
#define MOTORID_GRADIENTS_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "motorid/dataset.h"
#include "motorid/dynamics.h"
#include "motorid/integrators.h"

namespace motorid {

// Derivative of a scalar loss with respect to MotorParams. d_neural has one
// entry per head weight when the head is active and is empty otherwise.
// Plant constants (gains, rod, gravity) are not differentiated.
struct ParamGradient {
  double d_armature = 0.0;
  double d_damping = 0.0;
  double d_frictionloss = 0.0;
  std::vector<double> d_neural;

  static ParamGradient ZerosLike(const MotorParams& params);

  ParamGradient& operator+=(const ParamGradient& other);
  ParamGradient& operator*=(double scale);
  // [d_armature, d_damping, d_frictionloss, d_neural...]
  std::vector<double> Flatten() const;

  friend bool operator==(const ParamGradient&, const ParamGradient&) = default;
};

// Flat parameter vector in the same order as ParamGradient::Flatten().
std::vector<double> FlattenParams(const MotorParams& params);
// Copy of `layout` with values taken from `flat`.
MotorParams UnflattenParams(const MotorParams& layout,
                            std::span<const double> flat);
// Lower bounds per flat component (-inf for head weights).
std::vector<double> ParamLowerBounds(const MotorParams& params);
std::vector<std::string> ParamNames(const MotorParams& params);

struct LossGradient {
  double loss = 0.0;
  ParamGradient grad;
};

// Sum over the segment of squared state errors after each step, starting from
// the measured initial state.
double SegmentLoss(const Segment& segment, const MotorParams& params,
                   const PlantConfig& cfg, IntegratorKind kind);

// Loss and its exact gradient via an adjoint sweep over the recorded rollout.
LossGradient SegmentLossGrad(const Segment& segment, const MotorParams& params,
                             const PlantConfig& cfg, IntegratorKind kind);

// Adjoint of one Step: given dL/d(next state), returns dL/d(state) and adds
// dL/d(params) into `grad`.
JointState StepVjp(const JointState& state, const Action& action,
                   const MotorParams& params, const PlantConfig& cfg,
                   IntegratorKind kind, const JointState& next_adjoint,
                   ParamGradient& grad);

// Sums over segments in ascending index order, so the result does not depend
// on `threads`. A divergent segment raises DivergenceError with index() set to
// the lowest failing segment.
double TotalLoss(std::span<const Segment> batch, const MotorParams& params,
                 const PlantConfig& cfg, IntegratorKind kind, int threads = 1);
LossGradient TotalLossGrad(std::span<const Segment> batch,
                           const MotorParams& params, const PlantConfig& cfg,
                           IntegratorKind kind, int threads = 1);

// Central differences of f at x with per-component step h * max(1, |x_i|).
// Where x_i - step would cross lower_bounds[i] the second-order one-sided
// stencil (-3 f(x) + 4 f(x + s) - f(x + 2 s)) / (2 s) is used instead.
std::vector<double> FiniteDifferenceGradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> lower_bounds, double h);

// Ridders' extrapolation of central differences. Tableaus start at steps
// h, h / 10 and h / 100 (times max(1, |x_i|)), shrink by 1.4 per stage, and the
// entry with the smallest error estimate across all of them is returned. The step is capped at half the distance to
// lower_bounds[i]; a component sitting on its bound falls back to the
// one-sided stencil with step 1e-6 * max(1, |x_i|).
std::vector<double> RiddersGradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> lower_bounds, double h);

enum class DifferenceScheme { kCentral, kRidders };

// Finite-difference oracle for TotalLossGrad.
ParamGradient FiniteDiffGrad(std::span<const Segment> batch,
                             const MotorParams& params, const PlantConfig& cfg,
                             IntegratorKind kind, double h,
                             DifferenceScheme scheme = DifferenceScheme::kCentral);

struct GradientComponentCheck {
  std::string name;
  double analytic = 0.0;
  double numeric = 0.0;
  double error = 0.0;     // relative, or absolute when `absolute` is set
  bool absolute = false;  // both gradients below the tiny threshold
  bool pass = false;
};

struct GradientCheck {
  std::vector<GradientComponentCheck> components;
  double max_relative_error = 0.0;
  bool pass = true;
};

struct GradientTolerance {
  double relative = 1e-4;
  double absolute = 1e-8;
  // Components with max(|analytic|, |numeric|) below this compare absolutely.
  double tiny = 1e-10;
  friend bool operator==(const GradientTolerance&,
                         const GradientTolerance&) = default;
};

GradientCheck CompareGradients(const MotorParams& layout,
                               const ParamGradient& analytic,
                               const ParamGradient& numeric,
                               const GradientTolerance& tolerance = {});

}  // namespace motorid

#endif  // MOTORID_GRADIENTS_H_
