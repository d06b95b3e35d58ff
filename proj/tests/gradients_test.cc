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

#include "motorid/gradients.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "motorid/errors.h"
#include "motorid/gradcheck.h"
#include "motorid/neural_friction.h"

namespace motorid {
namespace {

constexpr IntegratorKind kAllKinds[] = {
    IntegratorKind::kEuler, IntegratorKind::kSemiImplicitEuler, IntegratorKind::kRk4};

Segment MakeSegment(const JointState& initial, const std::vector<Action>& actions,
                    const MotorParams& source, const PlantConfig& cfg,
                    IntegratorKind kind, double offset) {
  Segment seg;
  seg.initial = initial;
  seg.actions = actions;
  const Rollout r = RollOut(initial, actions, source, cfg, kind);
  for (std::size_t i = 1; i < r.states.size(); ++i) {
    seg.targets.push_back({r.states[i].q + offset * i, r.states[i].v - 2 * offset * i});
  }
  return seg;
}

std::vector<Segment> MakeBatch(const PlantConfig& cfg, IntegratorKind kind, int count) {
  std::vector<Segment> batch;
  const MotorParams source{0.012, 0.08, 0.06, std::nullopt};
  for (int k = 0; k < count; ++k) {
    const double phase = 0.37 * k;
    std::vector<Action> actions;
    for (int i = 0; i < 4; ++i) actions.push_back({std::sin(phase + 0.01 * i)});
    batch.push_back(MakeSegment({std::sin(phase) * 0.9, std::cos(phase) * 2.0}, actions,
                                source, cfg, kind, 1e-4));
  }
  return batch;
}

void ExpectGradNear(const ParamGradient& a, const ParamGradient& b, double rel) {
  const std::vector<double> fa = a.Flatten();
  const std::vector<double> fb = b.Flatten();
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    EXPECT_NEAR(fa[i], fb[i], rel * std::max(std::abs(fb[i]), 1e-10)) << "component " << i;
  }
}

TEST(SegmentLossTest, ZeroWhenTargetsAreTheModelRollout) {
  const PlantConfig cfg;
  const MotorParams p{0.01, 0.1, 0.05, std::nullopt};
  for (IntegratorKind kind : kAllKinds) {
    const Segment seg = MakeSegment({0.2, 0.5}, {{0.3}, {0.3}, {0.4}, {0.4}}, p, cfg, kind, 0);
    const LossGradient lg = SegmentLossGrad(seg, p, cfg, kind);
    EXPECT_EQ(lg.loss, 0.0);
    EXPECT_EQ(lg.grad, ParamGradient::ZerosLike(p));
  }
}

TEST(SegmentLossTest, MatchesHandSum) {
  const PlantConfig cfg;
  const MotorParams p{0.01, 0.1, 0.05, std::nullopt};
  Segment seg;
  seg.initial = {0.1, 0.2};
  seg.actions = {{0.5}, {0.5}};
  seg.targets = {{0.0, 0.0}, {1.0, 1.0}};
  const Rollout r = RollOut(seg.initial, seg.actions, p, cfg, IntegratorKind::kEuler);
  double want = 0.0;
  for (int i = 0; i < 2; ++i) {
    want += std::pow(r.states[i + 1].q - seg.targets[i].q, 2) +
            std::pow(r.states[i + 1].v - seg.targets[i].v, 2);
  }
  EXPECT_DOUBLE_EQ(SegmentLoss(seg, p, cfg, IntegratorKind::kEuler), want);
  EXPECT_DOUBLE_EQ(SegmentLossGrad(seg, p, cfg, IntegratorKind::kEuler).loss, want);
}

class AdjointTest : public ::testing::TestWithParam<std::tuple<IntegratorKind, bool>> {};

TEST_P(AdjointTest, MatchesFiniteDifferences) {
  const auto [kind, hold] = GetParam();
  PlantConfig cfg;
  cfg.hold_pd_torque = hold;
  const std::vector<Segment> batch = MakeBatch(cfg, kind, 6);
  for (const MotorParams& p :
       {MotorParams{0.01, 0.1, 0.05, std::nullopt},
        MotorParams{0.03, 0.2, 0.02, NeuralFrictionHead::Random(4, 5, 0.5)}}) {
    const LossGradient analytic = TotalLossGrad(batch, p, cfg, kind);
    const ParamGradient numeric =
        FiniteDiffGrad(batch, p, cfg, kind, 1e-2, DifferenceScheme::kRidders);
    const GradientCheck check = CompareGradients(p, analytic.grad, numeric);
    EXPECT_TRUE(check.pass) << "max rel " << check.max_relative_error;
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllIntegrators, AdjointTest,
    ::testing::Combine(::testing::ValuesIn(kAllKinds), ::testing::Bool()));

TEST(AdjointTest, SaturatedTorqueMatchesFiniteDifferences) {
  PlantConfig cfg;
  cfg.torque_limit = 0.5;
  for (IntegratorKind kind : kAllKinds) {
    const std::vector<Segment> batch = MakeBatch(cfg, kind, 6);
    const MotorParams p{0.01, 0.1, 0.05, std::nullopt};
    const LossGradient analytic = TotalLossGrad(batch, p, cfg, kind);
    const ParamGradient numeric =
        FiniteDiffGrad(batch, p, cfg, kind, 1e-2, DifferenceScheme::kRidders);
    EXPECT_TRUE(CompareGradients(p, analytic.grad, numeric).pass) << ToString(kind);
  }
}

TEST(StepVjpTest, MatchesStepJacobian) {
  const PlantConfig cfg;
  const MotorParams p{0.02, 0.3, 0.1, std::nullopt};
  const JointState s{0.4, -0.7};
  const Action a{0.9};
  const JointState w{0.6, -1.3};
  const double h = 1e-6;
  for (IntegratorKind kind : kAllKinds) {
    ParamGradient grad = ParamGradient::ZerosLike(p);
    const JointState adj = StepVjp(s, a, p, cfg, kind, w, grad);
    auto dot = [&](const JointState& x) { return w.q * x.q + w.v * x.v; };
    auto f_state = [&](double dq, double dv) {
      return dot(Step({s.q + dq, s.v + dv}, a, p, cfg, kind));
    };
    EXPECT_NEAR(adj.q, (f_state(h, 0) - f_state(-h, 0)) / (2 * h), 1e-7);
    EXPECT_NEAR(adj.v, (f_state(0, h) - f_state(0, -h)) / (2 * h), 1e-7);
    auto f_damping = [&](double e) {
      MotorParams q = p;
      q.damping += e;
      return dot(Step(s, a, q, cfg, kind));
    };
    EXPECT_NEAR(grad.d_damping, (f_damping(h) - f_damping(-h)) / (2 * h), 1e-9);
  }
}

TEST(TotalLossGradTest, SumOfSegmentGradients) {
  const PlantConfig cfg;
  const MotorParams p{0.01, 0.1, 0.05, std::nullopt};
  const std::vector<Segment> batch = MakeBatch(cfg, IntegratorKind::kEuler, 5);
  ParamGradient sum = ParamGradient::ZerosLike(p);
  double loss = 0.0;
  for (const Segment& seg : batch) {
    const LossGradient lg = SegmentLossGrad(seg, p, cfg, IntegratorKind::kEuler);
    loss += lg.loss;
    sum += lg.grad;
  }
  const LossGradient total = TotalLossGrad(batch, p, cfg, IntegratorKind::kEuler);
  EXPECT_EQ(total.loss, loss);
  EXPECT_EQ(total.grad, sum);
  EXPECT_EQ(TotalLoss(batch, p, cfg, IntegratorKind::kEuler), loss);
}

TEST(TotalLossGradTest, IndependentOfThreadCount) {
  const PlantConfig cfg;
  const MotorParams p{0.01, 0.1, 0.05, NeuralFrictionHead::Random(2, 4)};
  const std::vector<Segment> batch = MakeBatch(cfg, IntegratorKind::kRk4, 37);
  const LossGradient one = TotalLossGrad(batch, p, cfg, IntegratorKind::kRk4, 1);
  for (int threads : {2, 3, 8}) {
    const LossGradient many = TotalLossGrad(batch, p, cfg, IntegratorKind::kRk4, threads);
    EXPECT_EQ(one.loss, many.loss);
    EXPECT_EQ(one.grad, many.grad);
  }
}

TEST(TotalLossGradTest, ReportsLowestDivergentSegment) {
  const PlantConfig cfg;
  std::vector<Segment> batch = MakeBatch(cfg, IntegratorKind::kEuler, 6);
  batch[2].initial.v = 1e300;
  batch[4].initial.v = 1e300;
  const MotorParams p{0.01, 1e10, 0.05, std::nullopt};
  for (int threads : {1, 3}) {
    try {
      TotalLossGrad(batch, p, cfg, IntegratorKind::kEuler, threads);
      FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
      ASSERT_TRUE(e.index().has_value());
      EXPECT_EQ(*e.index(), 2u);
    }
  }
}

TEST(NeuralGradientTest, ZeroHeadReproducesParametricGradient) {
  const PlantConfig cfg;
  const std::vector<Segment> batch = MakeBatch(cfg, IntegratorKind::kRk4, 4);
  MotorParams plain{0.01, 0.1, 0.05, std::nullopt};
  MotorParams zero_head = plain;
  zero_head.neural_friction = NeuralFrictionHead::Zeros(8);
  for (IntegratorKind kind : kAllKinds) {
    const LossGradient a = TotalLossGrad(batch, plain, cfg, kind);
    const LossGradient b = TotalLossGrad(batch, zero_head, cfg, kind);
    EXPECT_EQ(a.loss, b.loss);
    EXPECT_EQ(a.grad.d_armature, b.grad.d_armature);
    EXPECT_EQ(a.grad.d_damping, b.grad.d_damping);
    EXPECT_EQ(a.grad.d_frictionloss, b.grad.d_frictionloss);
    EXPECT_EQ(b.grad.d_neural.size(), NeuralFrictionHead::WeightCount(8));
  }
}

TEST(NeuralGradientTest, ZeroResidualGivesZeroWeightGradient) {
  const PlantConfig cfg;
  MotorParams p{0.01, 0.1, 0.05, NeuralFrictionHead::Random(8)};
  const Segment seg = MakeSegment({0.3, 1.1}, {{0.2}, {0.2}, {0.3}, {0.3}}, p, cfg,
                                  IntegratorKind::kEuler, 0.0);
  const LossGradient lg = SegmentLossGrad(seg, p, cfg, IntegratorKind::kEuler);
  for (double g : lg.grad.d_neural) EXPECT_EQ(g, 0.0);
}

TEST(FlattenTest, RoundTrips) {
  const MotorParams p{0.01, 0.1, 0.05, NeuralFrictionHead::Random(1, 3)};
  const std::vector<double> flat = FlattenParams(p);
  ASSERT_EQ(flat.size(), 3u + NeuralFrictionHead::WeightCount(3));
  EXPECT_EQ(UnflattenParams(p, flat), p);
  const std::vector<std::string> names = ParamNames(p);
  EXPECT_EQ(names[0], "armature");
  EXPECT_EQ(names[3], "neural[0]");
  const std::vector<double> lb = ParamLowerBounds(p);
  EXPECT_EQ(lb[0], kArmatureFloor);
  EXPECT_EQ(lb[1], 0.0);
  EXPECT_EQ(lb[3], -std::numeric_limits<double>::infinity());
}

TEST(FiniteDifferenceTest, CentralAndOneSided) {
  auto f = [](std::span<const double> x) { return x[0] * x[0] * x[0] + std::exp(x[1]); };
  const std::vector<double> x = {0.5, 0.0};
  const std::vector<double> lb = {-1.0, 0.0};
  const std::vector<double> g = FiniteDifferenceGradient(f, x, lb, 1e-5);
  EXPECT_NEAR(g[0], 0.75, 1e-8);
  // x[1] sits on its bound, so only forward points are used.
  EXPECT_NEAR(g[1], 1.0, 1e-8);
}

TEST(FiniteDifferenceTest, RiddersIsAccurate) {
  auto f = [](std::span<const double> x) { return std::sin(3.0 * x[0]) / (1.0 + x[1]); };
  const std::vector<double> x = {0.4, 0.2};
  const std::vector<double> lb = {-std::numeric_limits<double>::infinity(), 0.0};
  const std::vector<double> g = RiddersGradient(f, x, lb, 1e-1);
  EXPECT_NEAR(g[0], 3.0 * std::cos(1.2) / 1.2, 1e-12);
  EXPECT_NEAR(g[1], -std::sin(1.2) / (1.2 * 1.2), 1e-12);
}

TEST(FiniteDifferenceTest, RejectsBadStep) {
  auto f = [](std::span<const double> x) { return x[0]; };
  const std::vector<double> x = {1.0};
  EXPECT_THROW(FiniteDifferenceGradient(f, x, x, 0.0), ConfigError);
  EXPECT_THROW(RiddersGradient(f, x, std::vector<double>{}, 1e-3), ConfigError);
}

TEST(CompareGradientsTest, RelativeAndAbsoluteRules) {
  const MotorParams p = MotorParams::Baseline();
  ParamGradient a = ParamGradient::ZerosLike(p);
  ParamGradient b = a;
  a.d_armature = 1.0;
  b.d_armature = 1.0 + 5e-5;
  a.d_damping = 0.0;
  b.d_damping = 5e-11;
  GradientCheck check = CompareGradients(p, a, b);
  EXPECT_TRUE(check.pass);
  EXPECT_FALSE(check.components[0].absolute);
  EXPECT_TRUE(check.components[1].absolute);

  b.d_armature = 1.0 + 2e-4;
  check = CompareGradients(p, a, b);
  EXPECT_FALSE(check.pass);
  EXPECT_FALSE(check.components[0].pass);

  b = a;
  b.d_frictionloss = std::nan("");
  EXPECT_FALSE(CompareGradients(p, a, b).pass);
}

TEST(GradCheckTest, DefaultSuitePasses) {
  const GradCheckReport report = RunGradCheck(GradCheckSpec{}, PlantConfig{});
  EXPECT_EQ(report.pairs.size(), 20u);
  EXPECT_TRUE(report.pass) << report.max_relative_error;
  EXPECT_LT(report.max_relative_error, 1e-4);
}

TEST(GradCheckTest, NeuralSuitePasses) {
  GradCheckSpec spec;
  spec.hidden = 16;
  const GradCheckReport report = RunGradCheck(spec, PlantConfig{});
  EXPECT_TRUE(report.pass) << report.max_relative_error;
}

TEST(GradCheckTest, CorruptedAdjointFails) {
  const GradCheckReport report = RunGradCheck(
      GradCheckSpec{}, PlantConfig{}, [](ParamGradient& g) { g.d_damping *= 1.01; });
  EXPECT_FALSE(report.pass);
}

TEST(GradCheckTest, ZeroResidualReportsZeroGradients) {
  GradCheckSpec spec;
  spec.zero_residual = true;
  const GradCheckReport report = RunGradCheck(spec, PlantConfig{});
  EXPECT_TRUE(report.pass);
  for (const GradCheckPair& pair : report.pairs) {
    EXPECT_EQ(pair.loss, 0.0);
    for (const GradientComponentCheck& c : pair.check.components) {
      EXPECT_EQ(c.analytic, 0.0);
    }
  }
}

TEST(GradCheckTest, PairsAreSeeded) {
  GradCheckSpec spec;
  const auto [p0, s0] = SampleGradCheckPair(spec, PlantConfig{}, 3);
  const auto [p1, s1] = SampleGradCheckPair(spec, PlantConfig{}, 3);
  EXPECT_EQ(p0, p1);
  EXPECT_EQ(s0.targets, s1.targets);
  spec.seed = 1;
  EXPECT_NE(SampleGradCheckPair(spec, PlantConfig{}, 3).first, p0);
}

}  // namespace
}  // namespace motorid
