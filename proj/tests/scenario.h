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

#ifndef MOTORID_TESTS_SCENARIO_H_
#define MOTORID_TESTS_SCENARIO_H_

#include "motorid/dataset.h"
#include "motorid/dynamics.h"
#include "motorid/excitation.h"
#include "motorid/sysid.h"

namespace motorid::testing {

// Synthetic twin with hidden (0.01, 0.1, 0.05), 60 s of excitation at 1 ms,
// split 80/20 and cut into 4-step training segments.
struct RecoveryScenario {
  PlantConfig cfg;
  MotorParams truth;
  TrajectoryDataset data;
  TrajectoryDataset train;
  TrajectoryDataset test;
  SegmentBatch batch;
};

inline RecoveryScenario MakeRecoveryScenario(bool noisy, double duration = 60.0) {
  RecoveryScenario sc;
  FourierSpec spec;
  spec.duration = duration;
  SyntheticTwinSpec twin;
  if (!noisy) {
    twin.noise_std_q = 0.0;
    twin.noise_std_v = 0.0;
  }
  sc.truth = twin.true_params;
  sc.data = SimulateTwin(IntegrateToAngles(spec, 0.0, sc.cfg.delta), {0.0, 0.0}, twin,
                         sc.cfg);
  auto [train, test] = Split(Resample(sc.data, sc.cfg.delta), 0.8);
  sc.train = std::move(train);
  sc.test = std::move(test);
  sc.batch = SegmentDataset(sc.train, 4);
  return sc;
}

// Optimizer settings used for recovery runs: the library default of 500 Adam
// epochs at 1e-3 stops short of the optimum on this problem.
inline FitConfig RecoveryFitConfig(IntegratorKind kind = IntegratorKind::kEuler) {
  FitConfig fit;
  fit.learning_rate = LearningRates::Uniform(1e-2);
  fit.epochs = 1000;
  fit.integrator = kind;
  return fit;
}

}  // namespace motorid::testing

#endif  // MOTORID_TESTS_SCENARIO_H_
