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

#include "motorid/json_io.h"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "motorid/errors.h"
#include "motorid/hash.h"

namespace motorid {
namespace {

using nlohmann::json;

void CheckKeys(const json& j, std::string_view what,
               std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + " must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view key : allowed) known = known || item.key() == key;
    if (!known) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(what));
    }
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

json FiniteOrNull(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

json OptionalOrNull(const std::optional<double>& value) {
  return value ? FiniteOrNull(*value) : json(nullptr);
}

}  // namespace

void to_json(json& j, const JointState& s) { j = {{"q", s.q}, {"v", s.v}}; }

void from_json(const json& j, JointState& s) {
  CheckKeys(j, "joint state", {"q", "v"});
  Read(j, "q", s.q);
  Read(j, "v", s.v);
}

void to_json(json& j, const NeuralFrictionHead& head) {
  j = {{"hidden", head.hidden()},
       {"input_scale", head.input_scale()},
       {"weights", std::vector<double>(head.weights().begin(), head.weights().end())}};
}

NeuralFrictionHead NeuralFrictionHeadFromJson(const json& j) {
  CheckKeys(j, "neural_friction", {"hidden", "input_scale", "weights", "seed"});
  int hidden = NeuralFrictionHead::kDefaultHidden;
  double input_scale = 1.0;
  Read(j, "hidden", hidden);
  Read(j, "input_scale", input_scale);
  if (j.contains("weights")) {
    std::vector<double> weights;
    Read(j, "weights", weights);
    return NeuralFrictionHead(hidden, input_scale, std::move(weights));
  }
  // Without explicit weights the head is drawn from `seed`.
  std::uint64_t seed = 0;
  Read(j, "seed", seed);
  return NeuralFrictionHead::Random(seed, hidden, input_scale);
}

void to_json(json& j, const MotorParams& p) {
  j = {{"armature", p.armature},
       {"damping", p.damping},
       {"frictionloss", p.frictionloss}};
  if (p.neural_friction) j["neural_friction"] = *p.neural_friction;
}

void from_json(const json& j, MotorParams& p) {
  CheckKeys(j, "motor params",
            {"armature", "damping", "frictionloss", "neural_friction",
             "hidden_from_fitter"});
  Read(j, "armature", p.armature);
  Read(j, "damping", p.damping);
  Read(j, "frictionloss", p.frictionloss);
  if (j.contains("neural_friction") && !j.at("neural_friction").is_null()) {
    p.neural_friction = NeuralFrictionHeadFromJson(j.at("neural_friction"));
  } else {
    p.neural_friction.reset();
  }
}

void to_json(json& j, const PlantConfig& cfg) {
  j = {{"rod_mass", cfg.rod_mass},
       {"rod_length", cfg.rod_length},
       {"gravity", cfg.gravity},
       {"kp", cfg.kp},
       {"kd", cfg.kd},
       {"torque_limit", FiniteOrNull(cfg.torque_limit)},
       {"friction_smoothing_velocity", cfg.friction_smoothing_velocity},
       {"delta", cfg.delta},
       {"hold_pd_torque", cfg.hold_pd_torque}};
}

void from_json(const json& j, PlantConfig& cfg) {
  CheckKeys(j, "plant",
            {"rod_mass", "rod_length", "gravity", "kp", "kd", "torque_limit",
             "friction_smoothing_velocity", "delta", "hold_pd_torque"});
  Read(j, "rod_mass", cfg.rod_mass);
  Read(j, "rod_length", cfg.rod_length);
  Read(j, "gravity", cfg.gravity);
  Read(j, "kp", cfg.kp);
  Read(j, "kd", cfg.kd);
  if (j.contains("torque_limit")) {
    if (j.at("torque_limit").is_null()) {
      cfg.torque_limit = std::numeric_limits<double>::infinity();
    } else {
      Read(j, "torque_limit", cfg.torque_limit);
    }
  }
  Read(j, "friction_smoothing_velocity", cfg.friction_smoothing_velocity);
  Read(j, "delta", cfg.delta);
  Read(j, "hold_pd_torque", cfg.hold_pd_torque);
}

void to_json(json& j, IntegratorKind kind) { j = std::string(ToString(kind)); }

void from_json(const json& j, IntegratorKind& kind) {
  kind = ParseIntegratorKind(j.get<std::string>());
}

void to_json(json& j, OptimizerKind kind) { j = std::string(ToString(kind)); }

void from_json(const json& j, OptimizerKind& kind) {
  kind = ParseOptimizerKind(j.get<std::string>());
}

void to_json(json& j, const FourierMode& m) {
  j = {{"amplitude", m.amplitude}, {"frequency", m.frequency}, {"phase", m.phase}};
}

void from_json(const json& j, FourierMode& m) {
  CheckKeys(j, "Fourier mode", {"amplitude", "frequency", "phase"});
  Read(j, "amplitude", m.amplitude);
  Read(j, "frequency", m.frequency);
  Read(j, "phase", m.phase);
}

void to_json(json& j, const FourierSpec& spec) {
  j = {{"min_modes", spec.min_modes},
       {"max_modes", spec.max_modes},
       {"amplitude_range", {spec.amplitude_min, spec.amplitude_max}},
       {"frequency_range", {spec.frequency_min, spec.frequency_max}},
       {"phase_range", {spec.phase_min, spec.phase_max}},
       {"v_max", spec.v_max},
       {"duration", spec.duration},
       {"seed", spec.seed},
       {"modes", spec.modes},
       {"velocity_offset", spec.velocity_offset}};
}

void from_json(const json& j, FourierSpec& spec) {
  CheckKeys(j, "excitation",
            {"min_modes", "max_modes", "amplitude_range", "frequency_range",
             "phase_range", "v_max", "duration", "seed", "modes",
             "velocity_offset"});
  auto read_range = [&](const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    std::vector<double> range;
    Read(j, key, range);
    if (range.size() != 2) {
      throw ConfigError(std::string(key) + " must be a [min, max] pair");
    }
    lo = range[0];
    hi = range[1];
  };
  Read(j, "min_modes", spec.min_modes);
  Read(j, "max_modes", spec.max_modes);
  read_range("amplitude_range", spec.amplitude_min, spec.amplitude_max);
  read_range("frequency_range", spec.frequency_min, spec.frequency_max);
  read_range("phase_range", spec.phase_min, spec.phase_max);
  Read(j, "v_max", spec.v_max);
  Read(j, "duration", spec.duration);
  Read(j, "seed", spec.seed);
  Read(j, "modes", spec.modes);
  Read(j, "velocity_offset", spec.velocity_offset);
}

void to_json(json& j, const SyntheticTwinSpec& twin) {
  j = {{"true_params", twin.true_params},
       {"noise_std_q", twin.noise_std_q},
       {"noise_std_v", twin.noise_std_v},
       {"noise_seed", twin.noise_seed},
       {"substeps", twin.substeps}};
}

void from_json(const json& j, SyntheticTwinSpec& twin) {
  CheckKeys(j, "twin",
            {"true_params", "noise_std_q", "noise_std_v", "noise_seed", "substeps"});
  Read(j, "true_params", twin.true_params);
  Read(j, "noise_std_q", twin.noise_std_q);
  Read(j, "noise_std_v", twin.noise_std_v);
  Read(j, "noise_seed", twin.noise_seed);
  Read(j, "substeps", twin.substeps);
}

void to_json(json& j, const LearningRates& lr) {
  j = {{"armature", lr.armature},
       {"damping", lr.damping},
       {"frictionloss", lr.frictionloss},
       {"neural", lr.neural}};
}

void from_json(const json& j, LearningRates& lr) {
  if (j.is_number()) {
    lr = LearningRates::Uniform(j.get<double>());
    return;
  }
  CheckKeys(j, "learning_rate", {"armature", "damping", "frictionloss", "neural"});
  Read(j, "armature", lr.armature);
  Read(j, "damping", lr.damping);
  Read(j, "frictionloss", lr.frictionloss);
  Read(j, "neural", lr.neural);
}

void to_json(json& j, const ParamFloors& floors) {
  j = {{"armature", floors.armature},
       {"damping", floors.damping},
       {"frictionloss", floors.frictionloss}};
}

void from_json(const json& j, ParamFloors& floors) {
  CheckKeys(j, "param_floors", {"armature", "damping", "frictionloss"});
  Read(j, "armature", floors.armature);
  Read(j, "damping", floors.damping);
  Read(j, "frictionloss", floors.frictionloss);
}

void to_json(json& j, const TrainableMask& mask) {
  j = {{"armature", mask.armature},
       {"damping", mask.damping},
       {"frictionloss", mask.frictionloss},
       {"neural", mask.neural}};
}

void from_json(const json& j, TrainableMask& mask) {
  CheckKeys(j, "trainable", {"armature", "damping", "frictionloss", "neural"});
  Read(j, "armature", mask.armature);
  Read(j, "damping", mask.damping);
  Read(j, "frictionloss", mask.frictionloss);
  Read(j, "neural", mask.neural);
}

void to_json(json& j, const FitConfig& fit) {
  j = {{"initial_params", fit.initial_params},
       {"optimizer", fit.optimizer},
       {"learning_rate", fit.learning_rate},
       {"beta1", fit.beta1},
       {"beta2", fit.beta2},
       {"epsilon", fit.epsilon},
       {"epochs", fit.epochs},
       {"minibatch_size", fit.minibatch_size},
       {"integrator", fit.integrator},
       {"seed", fit.seed},
       {"param_floors", fit.param_floors},
       {"trainable", fit.trainable},
       {"segment_steps", fit.segment_steps},
       {"threads", fit.threads}};
}

void from_json(const json& j, FitConfig& fit) {
  CheckKeys(j, "fit",
            {"initial_params", "optimizer", "learning_rate", "beta1", "beta2",
             "epsilon", "epochs", "minibatch_size", "integrator", "seed",
             "param_floors", "trainable", "segment_steps", "threads"});
  Read(j, "initial_params", fit.initial_params);
  Read(j, "optimizer", fit.optimizer);
  Read(j, "learning_rate", fit.learning_rate);
  Read(j, "beta1", fit.beta1);
  Read(j, "beta2", fit.beta2);
  Read(j, "epsilon", fit.epsilon);
  Read(j, "epochs", fit.epochs);
  Read(j, "minibatch_size", fit.minibatch_size);
  Read(j, "integrator", fit.integrator);
  Read(j, "seed", fit.seed);
  Read(j, "param_floors", fit.param_floors);
  Read(j, "trainable", fit.trainable);
  Read(j, "segment_steps", fit.segment_steps);
  Read(j, "threads", fit.threads);
}

void to_json(json& j, const EpochRecord& r) {
  j = {{"epoch", r.epoch},
       {"loss", r.loss},
       {"armature", r.armature},
       {"damping", r.damping},
       {"frictionloss", r.frictionloss}};
}

void to_json(json& j, const FitReport& report) {
  j = {{"initial_params", report.initial_params},
       {"best_params", report.best_params},
       {"best_epoch", report.best_epoch},
       {"initial_loss", report.initial_loss},
       {"best_loss", report.best_loss},
       {"loss_reduction", report.LossReduction()},
       {"history", report.history}};
}

void to_json(json& j, const ModelTrace& trace) {
  j = {{"mse_q", OptionalOrNull(trace.mse_q)},
       {"mse_v", OptionalOrNull(trace.mse_v)},
       {"diverged", trace.diverged_at.has_value()},
       {"diverged_at", trace.diverged_at ? json(*trace.diverged_at) : json(nullptr)}};
}

void to_json(json& j, const EvalReport& report) {
  j = {{"samples", report.timestamps.size()},
       {"optimized", report.optimized},
       {"baseline", report.baseline},
       {"mse_ratio", OptionalOrNull(report.mse_ratio)},
       {"baseline_only_diverged", report.mse_ratio && std::isinf(*report.mse_ratio)}};
}

void to_json(json& j, const GradientTolerance& tol) {
  j = {{"relative", tol.relative}, {"absolute", tol.absolute}, {"tiny", tol.tiny}};
}

void from_json(const json& j, GradientTolerance& tol) {
  CheckKeys(j, "gradcheck.tolerance", {"relative", "absolute", "tiny"});
  Read(j, "relative", tol.relative);
  Read(j, "absolute", tol.absolute);
  Read(j, "tiny", tol.tiny);
}

void to_json(json& j, const GradCheckSpec& spec) {
  j = {{"pairs", spec.pairs},
       {"seed", spec.seed},
       {"step", spec.step},
       {"segment_steps", spec.segment_steps},
       {"zero_residual", spec.zero_residual},
       {"hidden", spec.hidden},
       {"target_noise", spec.target_noise},
       {"tolerance", spec.tolerance}};
}

void from_json(const json& j, GradCheckSpec& spec) {
  CheckKeys(j, "gradcheck",
            {"pairs", "seed", "step", "segment_steps", "zero_residual", "hidden",
             "target_noise", "tolerance"});
  Read(j, "pairs", spec.pairs);
  Read(j, "seed", spec.seed);
  Read(j, "step", spec.step);
  Read(j, "segment_steps", spec.segment_steps);
  Read(j, "zero_residual", spec.zero_residual);
  Read(j, "hidden", spec.hidden);
  Read(j, "target_noise", spec.target_noise);
  Read(j, "tolerance", spec.tolerance);
}

void to_json(json& j, const GradCheckReport& report) {
  json pairs = json::array();
  for (const GradCheckPair& pair : report.pairs) {
    json components = json::array();
    for (const GradientComponentCheck& c : pair.check.components) {
      components.push_back({{"name", c.name},
                            {"analytic", c.analytic},
                            {"numeric", c.numeric},
                            {"error", FiniteOrNull(c.error)},
                            {"absolute", c.absolute},
                            {"pass", c.pass}});
    }
    pairs.push_back({{"index", pair.index},
                     {"integrator", pair.integrator},
                     {"loss", pair.loss},
                     {"params", pair.params},
                     {"max_relative_error", pair.check.max_relative_error},
                     {"pass", pair.check.pass},
                     {"components", std::move(components)}});
  }
  j = {{"pass", report.pass},
       {"max_relative_error", report.max_relative_error},
       {"pairs", std::move(pairs)}};
}

std::string PlantConfigHash(const PlantConfig& cfg) {
  return HexDigest(json(cfg).dump());
}

}  // namespace motorid
