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

#ifndef MOTORID_TOOLS_RUN_CONFIG_H_
#define MOTORID_TOOLS_RUN_CONFIG_H_

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "motorid/dynamics.h"
#include "motorid/excitation.h"
#include "motorid/gradcheck.h"
#include "motorid/sysid.h"

namespace motorid::tools {

inline constexpr int kRunConfigSchemaVersion = 1;

struct ArtifactPaths {
  std::string dataset = "dataset.csv";
  std::string fit_report = "fit_report.json";
  std::string fit_history = "fit_history.csv";
  std::string eval_report = "eval_report.json";
  std::string eval_errors = "eval_errors.csv";
  std::string gradcheck_report = "gradcheck_report.json";
  friend bool operator==(const ArtifactPaths&, const ArtifactPaths&) = default;
};

struct RunConfig {
  int schema_version = kRunConfigSchemaVersion;
  PlantConfig plant;
  FourierSpec excitation;
  SyntheticTwinSpec twin;
  FitConfig fit;
  // Leading fraction of the dataset used for training; the rest is the
  // held-out test split.
  double split_fraction = 0.8;
  JointState initial_state;
  // Comparison model for eval.
  MotorParams baseline_params = MotorParams::Baseline();
  GradCheckSpec gradcheck;
  ArtifactPaths paths;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

void Validate(const RunConfig& config);

void to_json(nlohmann::json& j, const ArtifactPaths& paths);
void from_json(const nlohmann::json& j, ArtifactPaths& paths);
void to_json(nlohmann::json& j, const RunConfig& config);
void from_json(const nlohmann::json& j, RunConfig& config);

// Applies "a.b.c=value" overrides to a config document. The value is parsed
// as JSON when possible and taken as a string otherwise.
void ApplyOverride(nlohmann::json& doc, const std::string& assignment);

// Defaults, then the file (if any), then the overrides. Throws ConfigError.
RunConfig LoadRunConfig(const std::filesystem::path& file,
                        const std::vector<std::string>& overrides);

}  // namespace motorid::tools

#endif  // MOTORID_TOOLS_RUN_CONFIG_H_
