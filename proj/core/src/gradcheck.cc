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

#include "motorid/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>

#include "motorid/errors.h"
#include "motorid/neural_friction.h"
#include "motorid/random.h"

namespace motorid {

void Validate(const GradCheckSpec& spec) {
  if (spec.pairs < 1) throw ConfigError("gradcheck.pairs must be >= 1");
  if (!(spec.step > 0.0) || !std::isfinite(spec.step)) {
    throw ConfigError("gradcheck.step must be positive and finite");
  }
  if (spec.segment_steps < 1) {
    throw ConfigError("gradcheck.segment_steps must be >= 1");
  }
  if (spec.hidden < 0) throw ConfigError("gradcheck.hidden must be >= 0");
  if (!(spec.target_noise >= 0.0)) {
    throw ConfigError("gradcheck.target_noise must be >= 0");
  }
  const GradientTolerance& tol = spec.tolerance;
  if (!(tol.relative > 0.0) || !(tol.absolute > 0.0) || !(tol.tiny >= 0.0)) {
    throw ConfigError("gradcheck tolerances must be positive");
  }
}

std::pair<MotorParams, Segment> SampleGradCheckPair(const GradCheckSpec& spec,
                                                    const PlantConfig& cfg,
                                                    int index) {
  // One stream per pair so a pair does not depend on the ones before it.
  Rng rng(spec.seed * 1000003ULL + static_cast<std::uint64_t>(index));
  const IntegratorKind kind = static_cast<IntegratorKind>(index % 3);

  MotorParams params;
  params.armature = std::exp(rng.Uniform(std::log(1e-3), std::log(5e-2)));
  params.damping = rng.Uniform(0.01, 0.5);
  params.frictionloss = rng.Uniform(0.01, 0.2);
  if (spec.hidden > 0) {
    params.neural_friction =
        NeuralFrictionHead::Random(
        static_cast<std::uint64_t>(rng.UniformInt(0, 1 << 30)), spec.hidden, 1.0);
  }

  Segment segment;
  segment.initial = {rng.Uniform(-3.0, 3.0), rng.Uniform(-3.0, 3.0)};
  segment.actions.resize(spec.segment_steps);
  for (Action& a : segment.actions) {
    a.q_des = segment.initial.q + rng.Uniform(-0.5, 0.5);
  }

  // Targets come from a different plant so the residuals are not zero.
  MotorParams source = params;
  if (!spec.zero_residual) {
    source.armature *= rng.Uniform(0.5, 1.5);
    source.damping *= rng.Uniform(0.5, 1.5);
    source.frictionloss *= rng.Uniform(0.5, 1.5);
  }
  const Rollout rollout =
      RollOut(segment.initial, segment.actions, source, cfg, kind);
  segment.targets.assign(rollout.states.begin() + 1, rollout.states.end());
  if (!spec.zero_residual) {
    for (JointState& s : segment.targets) {
      s.q += rng.Gaussian(0.0, spec.target_noise);
      s.v += rng.Gaussian(0.0, spec.target_noise);
    }
  }
  return {std::move(params), std::move(segment)};
}

GradCheckReport RunGradCheck(const GradCheckSpec& spec, const PlantConfig& cfg,
                             const std::function<void(ParamGradient&)>& tamper) {
  Validate(spec);
  Validate(cfg);
  GradCheckReport report;
  for (int i = 0; i < spec.pairs; ++i) {
    auto [params, segment] = SampleGradCheckPair(spec, cfg, i);
    const IntegratorKind kind = static_cast<IntegratorKind>(i % 3);
    std::span<const Segment> batch(&segment, 1);
    LossGradient analytic = TotalLossGrad(batch, params, cfg, kind);
    if (tamper) tamper(analytic.grad);
    const ParamGradient numeric =
        FiniteDiffGrad(batch, params, cfg, kind, spec.step,
                       DifferenceScheme::kRidders);

    GradCheckPair pair;
    pair.index = i;
    pair.integrator = kind;
    pair.loss = analytic.loss;
    pair.check = CompareGradients(params, analytic.grad, numeric, spec.tolerance);
    pair.params = std::move(params);
    report.max_relative_error =
        std::max(report.max_relative_error, pair.check.max_relative_error);
    report.pass = report.pass && pair.check.pass;
    report.pairs.push_back(std::move(pair));
  }
  return report;
}

}  // namespace motorid
