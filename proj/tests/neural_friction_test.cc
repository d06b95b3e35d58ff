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

#include "motorid/neural_friction.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "motorid/errors.h"
#include "motorid/excitation.h"
#include "motorid/sysid.h"

namespace motorid {
namespace {

TEST(NeuralFrictionHeadTest, WeightCountMatchesLayout) {
  EXPECT_EQ(NeuralFrictionHead::WeightCount(16), 49u);
  EXPECT_EQ(NeuralFrictionHead::Zeros().weights().size(), 49u);
  EXPECT_EQ(NeuralFrictionHead::Random(0, 4).weights().size(), 13u);
}

TEST(NeuralFrictionHeadTest, RejectsBadConstruction) {
  EXPECT_THROW(NeuralFrictionHead(0, 1.0, {}), ConfigError);
  EXPECT_THROW(NeuralFrictionHead(2, 0.0, std::vector<double>(7)), ConfigError);
  EXPECT_THROW(NeuralFrictionHead(2, 1.0, std::vector<double>(6)), ConfigError);
  std::vector<double> w(7, 0.0);
  w[3] = std::nan("");
  EXPECT_THROW(NeuralFrictionHead(2, 1.0, w), ConfigError);
}

TEST(NeuralFrictionHeadTest, RandomInitIsSeededAndBounded) {
  const NeuralFrictionHead a = NeuralFrictionHead::Random(42);
  EXPECT_EQ(a, NeuralFrictionHead::Random(42));
  EXPECT_NE(a, NeuralFrictionHead::Random(43));
  for (double w : a.weights()) {
    EXPECT_LE(std::abs(w), NeuralFrictionHead::kInitRange);
  }
}

TEST(NeuralFrictionHeadTest, ZeroAtRestForAnyWeights) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(NeuralFrictionHead::Random(seed, 8, 0.3).Torque(0.0), 0.0);
  }
}

TEST(NeuralFrictionHeadTest, ZeroWeightsGiveZeroTorque) {
  const NeuralFrictionHead head = NeuralFrictionHead::Zeros();
  for (double v : {-4.0, -0.01, 0.0, 1e-4, 3.0}) EXPECT_EQ(head.Torque(v), 0.0);
}

TEST(NeuralFrictionHeadTest, OddSymmetryIsExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NeuralFrictionHead head = NeuralFrictionHead::Random(seed, 16, 0.1 + seed * 0.05);
    for (double v : {1e-7, 1e-3, 0.25, 1.0, 3.7, 40.0}) {
      EXPECT_EQ(head.Torque(-v), -head.Torque(v));
    }
  }
}

TEST(NeuralFrictionHeadTest, DerivativesMatchFiniteDifferences) {
  const NeuralFrictionHead head = NeuralFrictionHead::Random(9, 6, 0.5);
  const double h = 1e-6;
  for (double v : {-2.0, -0.1, 0.0, 0.3, 1.7}) {
    const double fd = (head.Torque(v + h) - head.Torque(v - h)) / (2 * h);
    EXPECT_NEAR(head.TorqueDerivative(v), fd, 1e-8);

    std::vector<double> grad(head.weights().size(), 0.0);
    head.AccumulateWeightGradient(v, 2.0, grad);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      NeuralFrictionHead up = head, down = head;
      up.mutable_weights()[k] += h;
      down.mutable_weights()[k] -= h;
      const double fd_w = 2.0 * (up.Torque(v) - down.Torque(v)) / (2 * h);
      EXPECT_NEAR(grad[k], fd_w, 1e-8) << "weight " << k << " v " << v;
    }
  }
}

TEST(PrefitTest, ApproximatesParametricFriction) {
  std::vector<double> v, tau;
  for (int i = -4000; i <= 4000; ++i) {
    const double x = i * 1e-3;
    v.push_back(x);
    tau.push_back(-0.1 * x - 0.05 * std::tanh(x / 1e-3));
  }
  const NeuralFrictionHead head = PrefitHead(v, tau);
  double worst = 0.0;
  for (int i = -40000; i <= 40000; ++i) {
    const double x = i * 1e-4;
    worst = std::max(worst, std::abs(head.Torque(x) - (-0.1 * x - 0.05 * std::tanh(x / 1e-3))));
  }
  EXPECT_LT(worst, 5e-3);
}

TEST(PrefitTest, RejectsBadInput) {
  EXPECT_THROW(PrefitHead(std::vector<double>{}, std::vector<double>{}), ConfigError);
  EXPECT_THROW(PrefitHead(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
               ConfigError);
}

// Fitting the head on slow data leaves its fast-velocity output unconstrained:
// different initial weights extrapolate to very different torques at 4 rad/s.
TEST(NeuralFrictionCharacterizationTest, DataSparseExtrapolationVariesAcrossSeeds) {
  PlantConfig cfg;
  FourierSpec spec;
  spec.seed = 3;
  spec.duration = 10.0;
  spec.v_max = 0.3;
  spec.amplitude_min = 0.05;
  spec.amplitude_max = 0.15;
  SyntheticTwinSpec twin;
  twin.noise_std_q = 0.0;
  twin.noise_std_v = 0.0;
  const TrajectoryDataset data =
      SimulateTwin(IntegrateToAngles(spec, 0.0, cfg.delta), {0.0, 0.0}, twin, cfg);
  double v_max = 0.0;
  for (const JointState& s : data.states) v_max = std::max(v_max, std::abs(s.v));
  ASSERT_LT(v_max, 0.5);

  const SegmentBatch batch = SegmentDataset(data, 4);
  std::vector<double> extrapolated;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    FitConfig fit;
    fit.learning_rate = LearningRates::Uniform(1e-2);
    fit.epochs = 300;
    fit.initial_params.neural_friction = NeuralFrictionHead::Random(seed, 16, 0.1);
    fit.trainable.damping = false;
    fit.trainable.frictionloss = false;
    const FitReport report = Fit(batch, cfg, fit);
    EXPECT_LT(report.best_loss, 0.2 * report.initial_loss);
    extrapolated.push_back(report.best_params.neural_friction->Torque(4.0));
  }
  const auto [lo, hi] = std::minmax_element(extrapolated.begin(), extrapolated.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  EXPECT_GT((*hi - *lo) / scale, 0.5);
}

}  // namespace
}  // namespace motorid
