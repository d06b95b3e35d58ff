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

#ifndef MOTORID_JSON_IO_H_
#define MOTORID_JSON_IO_H_

// nlohmann::json conversions for the core types. Readers fill absent keys
// with defaults and reject unknown keys, so a config file only needs the
// leaves it changes and typos fail loudly (ConfigError).

#include <string>

#include <nlohmann/json.hpp>

#include "motorid/dynamics.h"
#include "motorid/excitation.h"
#include "motorid/gradcheck.h"
#include "motorid/integrators.h"
#include "motorid/neural_friction.h"
#include "motorid/sysid.h"

namespace motorid {

void to_json(nlohmann::json& j, const JointState& s);
void from_json(const nlohmann::json& j, JointState& s);

void to_json(nlohmann::json& j, const NeuralFrictionHead& head);
NeuralFrictionHead NeuralFrictionHeadFromJson(const nlohmann::json& j);

void to_json(nlohmann::json& j, const MotorParams& p);
void from_json(const nlohmann::json& j, MotorParams& p);

// An infinite torque_limit is written as null.
void to_json(nlohmann::json& j, const PlantConfig& cfg);
void from_json(const nlohmann::json& j, PlantConfig& cfg);

void to_json(nlohmann::json& j, IntegratorKind kind);
void from_json(const nlohmann::json& j, IntegratorKind& kind);
void to_json(nlohmann::json& j, OptimizerKind kind);
void from_json(const nlohmann::json& j, OptimizerKind& kind);

void to_json(nlohmann::json& j, const FourierMode& m);
void from_json(const nlohmann::json& j, FourierMode& m);
void to_json(nlohmann::json& j, const FourierSpec& spec);
void from_json(const nlohmann::json& j, FourierSpec& spec);
void to_json(nlohmann::json& j, const SyntheticTwinSpec& twin);
void from_json(const nlohmann::json& j, SyntheticTwinSpec& twin);

// A bare number sets every group to the same rate.
void to_json(nlohmann::json& j, const LearningRates& lr);
void from_json(const nlohmann::json& j, LearningRates& lr);
void to_json(nlohmann::json& j, const ParamFloors& floors);
void from_json(const nlohmann::json& j, ParamFloors& floors);
void to_json(nlohmann::json& j, const TrainableMask& mask);
void from_json(const nlohmann::json& j, TrainableMask& mask);
void to_json(nlohmann::json& j, const FitConfig& fit);
void from_json(const nlohmann::json& j, FitConfig& fit);

void to_json(nlohmann::json& j, const EpochRecord& r);
// Omits wall_time_seconds.
void to_json(nlohmann::json& j, const FitReport& report);
// Non-finite values are written as null.
void to_json(nlohmann::json& j, const ModelTrace& trace);
void to_json(nlohmann::json& j, const EvalReport& report);

void to_json(nlohmann::json& j, const GradientTolerance& tol);
void from_json(const nlohmann::json& j, GradientTolerance& tol);
void to_json(nlohmann::json& j, const GradCheckSpec& spec);
void from_json(const nlohmann::json& j, GradCheckSpec& spec);
void to_json(nlohmann::json& j, const GradCheckReport& report);

// Fingerprint of the canonical JSON form of the plant.
std::string PlantConfigHash(const PlantConfig& cfg);

}  // namespace motorid

#endif  // MOTORID_JSON_IO_H_
