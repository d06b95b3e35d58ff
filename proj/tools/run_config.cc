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

#include "run_config.h"

#include <cmath>
#include <fstream>

#include "motorid/errors.h"
#include "motorid/json_io.h"

namespace motorid::tools {

using nlohmann::json;

void Validate(const RunConfig& config) {
  if (config.schema_version != kRunConfigSchemaVersion) {
    throw ConfigError("unsupported config schema_version " +
                      std::to_string(config.schema_version));
  }
  motorid::Validate(config.plant);
  motorid::Validate(config.excitation);
  motorid::Validate(config.twin);
  motorid::Validate(config.fit);
  motorid::Validate(config.baseline_params);
  motorid::Validate(config.gradcheck);
  if (!(config.split_fraction > 0.0 && config.split_fraction < 1.0)) {
    throw ConfigError("split_fraction must lie in (0, 1)");
  }
  if (!std::isfinite(config.initial_state.q) ||
      !std::isfinite(config.initial_state.v)) {
    throw ConfigError("initial_state must be finite");
  }
  const ArtifactPaths& p = config.paths;
  for (const std::string* path : {&p.dataset, &p.fit_report, &p.fit_history,
                                  &p.eval_report, &p.eval_errors,
                                  &p.gradcheck_report}) {
    if (path->empty()) throw ConfigError("artifact paths must not be empty");
  }
}

void to_json(json& j, const ArtifactPaths& paths) {
  j = {{"dataset", paths.dataset},
       {"fit_report", paths.fit_report},
       {"fit_history", paths.fit_history},
       {"eval_report", paths.eval_report},
       {"eval_errors", paths.eval_errors},
       {"gradcheck_report", paths.gradcheck_report}};
}

void from_json(const json& j, ArtifactPaths& paths) {
  if (!j.is_object()) throw ConfigError("paths must be a JSON object");
  for (const auto& item : j.items()) {
    std::string* target = nullptr;
    if (item.key() == "dataset") target = &paths.dataset;
    if (item.key() == "fit_report") target = &paths.fit_report;
    if (item.key() == "fit_history") target = &paths.fit_history;
    if (item.key() == "eval_report") target = &paths.eval_report;
    if (item.key() == "eval_errors") target = &paths.eval_errors;
    if (item.key() == "gradcheck_report") target = &paths.gradcheck_report;
    if (target == nullptr) {
      throw ConfigError("unknown key '" + item.key() + "' in paths");
    }
    if (!item.value().is_string()) {
      throw ConfigError("paths." + item.key() + " must be a string");
    }
    *target = item.value().get<std::string>();
  }
}

void to_json(json& j, const RunConfig& config) {
  j = {{"schema_version", config.schema_version},
       {"plant", config.plant},
       {"excitation", config.excitation},
       {"twin", config.twin},
       {"fit", config.fit},
       {"split_fraction", config.split_fraction},
       {"initial_state", config.initial_state},
       {"baseline_params", config.baseline_params},
       {"gradcheck", config.gradcheck},
       {"paths", config.paths}};
}

void from_json(const json& j, RunConfig& config) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const json& value = item.value();
    try {
      if (key == "schema_version") {
        value.get_to(config.schema_version);
      } else if (key == "plant") {
        value.get_to(config.plant);
      } else if (key == "excitation") {
        value.get_to(config.excitation);
      } else if (key == "twin") {
        value.get_to(config.twin);
      } else if (key == "fit") {
        value.get_to(config.fit);
      } else if (key == "split_fraction") {
        value.get_to(config.split_fraction);
      } else if (key == "initial_state") {
        value.get_to(config.initial_state);
      } else if (key == "baseline_params") {
        value.get_to(config.baseline_params);
      } else if (key == "gradcheck") {
        value.get_to(config.gradcheck);
      } else if (key == "paths") {
        value.get_to(config.paths);
      } else {
        throw ConfigError("unknown top-level config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::string pointer;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("empty component in override key " + key);
    pointer += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr.parent_pointer())) {
    throw ConfigError("override targets a missing section: " + key);
  }
  doc[ptr] = std::move(value);
}

RunConfig LoadRunConfig(const std::filesystem::path& file,
                        const std::vector<std::string>& overrides) {
  json doc = RunConfig{};
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    json loaded = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (loaded.is_discarded()) {
      throw ConfigError("config file is not valid JSON: " + file.string());
    }
    // Parse once so unknown keys are reported against the file itself.
    RunConfig from_file;
    loaded.get_to(from_file);
    doc = from_file;
  }
  for (const std::string& assignment : overrides) ApplyOverride(doc, assignment);
  RunConfig config;
  doc.get_to(config);
  Validate(config);
  return config;
}

}  // namespace motorid::tools
