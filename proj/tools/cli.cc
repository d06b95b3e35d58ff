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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "motorid/dataset.h"
#include "motorid/errors.h"
#include "motorid/excitation.h"
#include "motorid/gradcheck.h"
#include "motorid/hash.h"
#include "motorid/json_io.h"
#include "motorid/sysid.h"
#include "run_config.h"

namespace motorid::tools {
namespace {

using nlohmann::json;

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> overrides;
  int threads = 0;
};

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << bytes;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string DumpJson(const json& doc) { return doc.dump(2) + "\n"; }

std::string Fixed(double value, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

RunConfig Resolve(const CommonOptions& options) {
  RunConfig config = LoadRunConfig(options.config_file, options.overrides);
  if (options.threads > 0) config.fit.threads = options.threads;
  return config;
}

// Dataset resampled onto the plant grid, then split.
std::pair<TrajectoryDataset, TrajectoryDataset> LoadSplit(
    const RunConfig& config, const std::string& bytes) {
  std::istringstream in(bytes);
  const TrajectoryDataset raw = ReadDataset(in);
  return Split(Resample(raw, config.plant.delta), config.split_fraction);
}

int CmdGen(const CommonOptions& options, std::ostream& out) {
  const RunConfig config = Resolve(options);
  const std::vector<Action> actions =
      IntegrateToAngles(config.excitation, config.initial_state.q,
                        config.plant.delta);
  const TrajectoryDataset data =
      SimulateTwin(actions, config.initial_state, config.twin, config.plant);
  std::ostringstream buffer;
  WriteDataset(data, buffer);
  WriteFileBytes(config.paths.dataset, buffer.str());

  double v_min = 0.0;
  double v_max = 0.0;
  double abs_sum = 0.0;
  for (const JointState& s : data.states) {
    v_min = std::min(v_min, s.v);
    v_max = std::max(v_max, s.v);
    abs_sum += std::abs(s.v);
  }
  out << "wrote " << config.paths.dataset << "\n"
      << "  duration      " << Fixed(data.timestamps.back()) << " s\n"
      << "  samples       " << data.size() << "\n"
      << "  velocity      [" << Fixed(v_min) << ", " << Fixed(v_max)
      << "] rad/s, mean |v| " << Fixed(abs_sum / data.size()) << "\n"
      << "  hash (fnv1a64) " << HexDigest(buffer.str()) << "\n";
  return kExitOk;
}

std::string HistoryCsv(const FitReport& report) {
  std::string csv = "epoch,loss,armature,damping,frictionloss\n";
  for (const EpochRecord& r : report.history) {
    csv += std::to_string(r.epoch) + "," + FormatDouble(r.loss) + "," +
           FormatDouble(r.armature) + "," + FormatDouble(r.damping) + "," +
           FormatDouble(r.frictionloss) + "\n";
  }
  return csv;
}

json Recovery(const MotorParams& truth, const MotorParams& fitted) {
  auto rel = [](double got, double want) {
    return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
  };
  return {{"armature", rel(fitted.armature, truth.armature)},
          {"damping", rel(fitted.damping, truth.damping)},
          {"frictionloss", rel(fitted.frictionloss, truth.frictionloss)}};
}

int CmdFit(const CommonOptions& options, bool allow_hash_mismatch, bool neural,
           std::ostream& out, std::ostream& err) {
  RunConfig config = Resolve(options);
  if (neural && !config.fit.initial_params.neural_friction) {
    // The head replaces the parametric friction terms.
    config.fit.initial_params.neural_friction = NeuralFrictionHead::Random(
        config.fit.seed, NeuralFrictionHead::kDefaultHidden, 0.1);
    config.fit.initial_params.damping = 0.0;
    config.fit.initial_params.frictionloss = 0.0;
    config.fit.trainable.damping = false;
    config.fit.trainable.frictionloss = false;
  }
  const std::string bytes = ReadFileBytes(config.paths.dataset);
  std::istringstream in(bytes);
  const TrajectoryDataset raw = ReadDataset(in);
  const std::string plant_hash = PlantConfigHash(config.plant);
  if (raw.metadata.plant_config_hash != plant_hash) {
    const std::string message = "dataset plant hash " +
                                raw.metadata.plant_config_hash +
                                " does not match config plant hash " + plant_hash;
    if (!allow_hash_mismatch) {
      throw ConfigError(message + " (pass --allow-hash-mismatch to override)");
    }
    err << "warning: " << message << "\n";
  }
  auto [train, test] = Split(Resample(raw, config.plant.delta), config.split_fraction);
  const SegmentBatch batch = SegmentDataset(train, config.fit.segment_steps);

  FitReport report;
  try {
    report = Fit(batch, config.plant, config.fit);
  } catch (const DivergenceError& e) {
    err << "error: fit diverged: " << e.what() << "\n";
    return kExitDivergence;
  }

  json doc = {{"schema_version", kReportSchemaVersion},
              {"kind", "motorid-fit-report"},
              {"config", config},
              {"inputs",
               {{"dataset", config.paths.dataset},
                {"dataset_hash", HexDigest(bytes)},
                {"train_samples", train.size()},
                {"segments", batch.segments.size()}}},
              {"result", report}};
  // Scoring only; computed after fitting from metadata the fitter ignores.
  if (raw.metadata.hidden_ground_truth) {
    doc["scoring"] = {
        {"relative_error_vs_hidden_truth",
         Recovery(*raw.metadata.hidden_ground_truth, report.best_params)}};
  }
  WriteFileBytes(config.paths.fit_report, DumpJson(doc));
  WriteFileBytes(config.paths.fit_history, HistoryCsv(report));

  const MotorParams& p = report.best_params;
  out << "wrote " << config.paths.fit_report << " and "
      << config.paths.fit_history << "\n"
      << "  loss          " << Fixed(report.initial_loss) << " -> "
      << Fixed(report.best_loss) << " (epoch " << report.best_epoch << ", "
      << Fixed(100.0 * report.LossReduction(), 4) << "% lower)\n"
      << "  armature      " << Fixed(p.armature) << "\n"
      << "  damping       " << Fixed(p.damping) << "\n"
      << "  frictionloss  " << Fixed(p.frictionloss) << "\n";
  if (p.neural_friction) {
    out << "  neural head   " << p.neural_friction->weights().size()
        << " weights\n";
  }
  return kExitOk;
}

// Accepts a fit report (uses result.best_params) or a bare MotorParams object.
MotorParams LoadParams(const std::string& bytes, const std::string& path) {
  const json doc = json::parse(bytes, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError(path + " is not valid JSON");
  MotorParams params;
  if (doc.contains("result") && doc.at("result").contains("best_params")) {
    doc.at("result").at("best_params").get_to(params);
  } else {
    doc.get_to(params);
  }
  motorid::Validate(params);
  return params;
}

std::string ErrorCsv(const EvalReport& report) {
  std::string csv =
      "t,optimized_abs_q_error,baseline_abs_q_error,"
      "optimized_abs_v_error,baseline_abs_v_error\n";
  auto cell = [](const std::vector<double>& series, std::size_t i) {
    return i < series.size() ? FormatDouble(series[i]) : std::string();
  };
  for (std::size_t i = 0; i < report.timestamps.size(); ++i) {
    csv += FormatDouble(report.timestamps[i]) + "," +
           cell(report.optimized.abs_q_error, i) + "," +
           cell(report.baseline.abs_q_error, i) + "," +
           cell(report.optimized.abs_v_error, i) + "," +
           cell(report.baseline.abs_v_error, i) + "\n";
  }
  return csv;
}

int CmdEval(const CommonOptions& options, const std::string& params_path,
            std::ostream& out) {
  const RunConfig config = Resolve(options);
  const std::string path =
      params_path.empty() ? config.paths.fit_report : params_path;
  const std::string params_bytes = ReadFileBytes(path);
  const MotorParams params = LoadParams(params_bytes, path);
  const std::string bytes = ReadFileBytes(config.paths.dataset);
  const TrajectoryDataset test = LoadSplit(config, bytes).second;

  const EvalReport report = Evaluate(test, params, config.baseline_params,
                                     config.plant, config.fit.integrator);
  json doc = {{"schema_version", kReportSchemaVersion},
              {"kind", "motorid-eval-report"},
              {"config", config},
              {"inputs",
               {{"dataset", config.paths.dataset},
                {"dataset_hash", HexDigest(bytes)},
                {"params", path},
                {"params_hash", HexDigest(params_bytes)},
                {"test_samples", test.size()}}},
              {"optimized_params", params},
              {"baseline_params", config.baseline_params},
              {"result", report}};
  WriteFileBytes(config.paths.eval_report, DumpJson(doc));
  WriteFileBytes(config.paths.eval_errors, ErrorCsv(report));

  auto mse = [](const ModelTrace& trace) {
    return trace.mse_q ? Fixed(*trace.mse_q)
                       : "diverged at step " + std::to_string(*trace.diverged_at);
  };
  out << "wrote " << config.paths.eval_report << " and "
      << config.paths.eval_errors << "\n"
      << "  test samples  " << test.size() << "\n"
      << "  q-MSE optimized " << mse(report.optimized) << "\n"
      << "  q-MSE baseline  " << mse(report.baseline) << "\n";
  if (report.mse_ratio) {
    out << "  baseline / optimized " << Fixed(*report.mse_ratio, 4) << "\n";
  }
  return kExitOk;
}

int CmdGradcheck(const CommonOptions& options, bool corrupt_adjoint,
                 std::ostream& out) {
  const RunConfig config = Resolve(options);
  std::function<void(ParamGradient&)> tamper;
  if (corrupt_adjoint) {
    tamper = [](ParamGradient& g) { g.d_damping *= 1.01; };
  }
  const GradCheckReport report = RunGradCheck(config.gradcheck, config.plant, tamper);
  json doc = {{"schema_version", kReportSchemaVersion},
              {"kind", "motorid-gradcheck-report"},
              {"config", config},
              {"corrupt_adjoint", corrupt_adjoint},
              {"result", report}};
  WriteFileBytes(config.paths.gradcheck_report, DumpJson(doc));

  int failed = 0;
  for (const GradCheckPair& pair : report.pairs) {
    if (!pair.check.pass) ++failed;
  }
  out << "wrote " << config.paths.gradcheck_report << "\n"
      << "  pairs         " << report.pairs.size() << " (" << failed
      << " failing)\n"
      << "  max rel error " << Fixed(report.max_relative_error, 3) << "\n"
      << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? kExitOk : kExitCheckFailed;
}

int CmdConfig(const CommonOptions& options, std::ostream& out) {
  out << DumpJson(Resolve(options));
  return kExitOk;
}

void AddCommon(CLI::App* cmd, CommonOptions& options) {
  cmd->add_option("-c,--config", options.config_file, "Run config JSON file");
  cmd->add_option("--set", options.overrides,
                  "Override a config leaf, e.g. --set fit.epochs=100")
      ->take_all();
  cmd->add_option("--threads", options.threads,
                  "Cap on gradient worker threads (overrides fit.threads)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentiable motor simulation and system identification"};
  app.name("motorid");
  app.require_subcommand(1);

  CommonOptions gen_opts, fit_opts, eval_opts, check_opts, config_opts;
  bool allow_hash_mismatch = false;
  bool neural = false;
  bool corrupt_adjoint = false;
  std::string params_path;

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic-twin dataset");
  AddCommon(gen, gen_opts);
  CLI::App* fit = app.add_subcommand("fit", "Identify motor parameters");
  AddCommon(fit, fit_opts);
  fit->add_flag("--allow-hash-mismatch", allow_hash_mismatch,
                "Fit even if the dataset came from a different plant config");
  fit->add_flag("--neural", neural,
                "Fit a neural friction head in place of damping/frictionloss");
  CLI::App* eval = app.add_subcommand("eval", "Open-loop held-out evaluation");
  AddCommon(eval, eval_opts);
  eval->add_option("--params", params_path,
                   "Fit report or params JSON (default: paths.fit_report)");
  CLI::App* check = app.add_subcommand("gradcheck", "Adjoint vs finite differences");
  AddCommon(check, check_opts);
  check->add_flag("--corrupt-adjoint", corrupt_adjoint,
                  "Perturb the analytic gradient (negative control)");
  CLI::App* config = app.add_subcommand("config", "Print the resolved config");
  AddCommon(config, config_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (gen->parsed()) return CmdGen(gen_opts, out);
    if (fit->parsed()) {
      return CmdFit(fit_opts, allow_hash_mismatch, neural, out, err);
    }
    if (eval->parsed()) return CmdEval(eval_opts, params_path, out);
    if (check->parsed()) return CmdGradcheck(check_opts, corrupt_adjoint, out);
    if (config->parsed()) return CmdConfig(config_opts, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace motorid::tools
