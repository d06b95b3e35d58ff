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

#include "motorid/sysid.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>

#include "motorid/errors.h"
#include "motorid/gradients.h"
#include "motorid/random.h"

namespace motorid {
namespace {

// Per-component settings in flat parameter order.
struct FlatSettings {
  std::vector<double> rate;
  std::vector<double> floor;
  std::vector<bool> trainable;
};

FlatSettings MakeSettings(const MotorParams& layout, const FitConfig& fit) {
  const std::size_t n = FlattenParams(layout).size();
  FlatSettings s;
  s.rate = {fit.learning_rate.armature, fit.learning_rate.damping,
            fit.learning_rate.frictionloss};
  s.floor = {std::max(fit.param_floors.armature, kArmatureFloor),
             fit.param_floors.damping, fit.param_floors.frictionloss};
  s.trainable = {fit.trainable.armature, fit.trainable.damping,
                 fit.trainable.frictionloss};
  s.rate.resize(n, fit.learning_rate.neural);
  s.floor.resize(n, -std::numeric_limits<double>::infinity());
  s.trainable.resize(n, fit.trainable.neural);
  return s;
}

class Optimizer {
 public:
  Optimizer(const FitConfig& fit, FlatSettings settings)
      : fit_(fit),
        settings_(std::move(settings)),
        first_(settings_.rate.size(), 0.0),
        second_(settings_.rate.size(), 0.0) {}

  void Update(std::vector<double>& x, const std::vector<double>& grad) {
    ++steps_;
    const double bias1 = 1.0 - std::pow(fit_.beta1, steps_);
    const double bias2 = 1.0 - std::pow(fit_.beta2, steps_);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!settings_.trainable[k]) continue;
      double step = grad[k];
      if (fit_.optimizer == OptimizerKind::kAdam) {
        first_[k] = fit_.beta1 * first_[k] + (1.0 - fit_.beta1) * grad[k];
        second_[k] = fit_.beta2 * second_[k] + (1.0 - fit_.beta2) * grad[k] * grad[k];
        step = (first_[k] / bias1) / (std::sqrt(second_[k] / bias2) + fit_.epsilon);
      }
      x[k] = std::max(x[k] - settings_.rate[k] * step, settings_.floor[k]);
    }
  }

 private:
  const FitConfig& fit_;
  FlatSettings settings_;
  std::vector<double> first_;
  std::vector<double> second_;
  int steps_ = 0;
};

LossGradient SubsetLossGrad(std::span<const Segment> batch,
                            std::span<const std::size_t> indices,
                            const MotorParams& params, const PlantConfig& cfg,
                            IntegratorKind kind) {
  LossGradient total;
  total.grad = ParamGradient::ZerosLike(params);
  for (std::size_t j : indices) {
    try {
      LossGradient part = SegmentLossGrad(batch[j], params, cfg, kind);
      total.loss += part.loss;
      total.grad += part.grad;
    } catch (const DivergenceError& e) {
      throw DivergenceError("segment " + std::to_string(j) + ": " + e.what(), j);
    }
  }
  return total;
}

std::string DescribeParams(const MotorParams& p) {
  return "armature=" + std::to_string(p.armature) +
         " damping=" + std::to_string(p.damping) +
         " frictionloss=" + std::to_string(p.frictionloss);
}

[[noreturn]] void ThrowEpochDivergence(int epoch, const MotorParams& params,
                                       const std::string& detail) {
  throw DivergenceError("fit diverged at epoch " + std::to_string(epoch) + " (" +
                            DescribeParams(params) + "): " + detail,
                        static_cast<std::size_t>(epoch));
}

ModelTrace TraceModel(const TrajectoryDataset& test, const MotorParams& params,
                      const PlantConfig& cfg, IntegratorKind kind) {
  Validate(params);
  ModelTrace trace;
  JointState x = test.states.front();
  trace.abs_q_error.push_back(0.0);
  trace.abs_v_error.push_back(0.0);
  double sum_q = 0.0;
  double sum_v = 0.0;
  for (std::size_t i = 0; i + 1 < test.size(); ++i) {
    try {
      x = Step(x, test.actions[i], params, cfg, kind);
    } catch (const DivergenceError&) {
      trace.diverged_at = i;
      return trace;
    }
    const double eq = x.q - test.states[i + 1].q;
    const double ev = x.v - test.states[i + 1].v;
    trace.abs_q_error.push_back(std::abs(eq));
    trace.abs_v_error.push_back(std::abs(ev));
    sum_q += eq * eq;
    sum_v += ev * ev;
  }
  const double count = static_cast<double>(test.size() - 1);
  trace.mse_q = sum_q / count;
  trace.mse_v = sum_v / count;
  if (!std::isfinite(*trace.mse_q) || !std::isfinite(*trace.mse_v)) {
    trace.mse_q.reset();
    trace.mse_v.reset();
    trace.diverged_at = test.size() - 1;
  }
  return trace;
}

}  // namespace

std::string_view ToString(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kGradientDescent:
      return "gradient_descent";
    case OptimizerKind::kAdam:
      return "adam";
  }
  return "unknown";
}

OptimizerKind ParseOptimizerKind(std::string_view name) {
  if (name == "gradient_descent") return OptimizerKind::kGradientDescent;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void Validate(const FitConfig& fit) {
  Validate(fit.initial_params);
  const LearningRates& lr = fit.learning_rate;
  for (double rate : {lr.armature, lr.damping, lr.frictionloss, lr.neural}) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw ConfigError("learning rates must be positive");
    }
  }
  if (fit.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (fit.minibatch_size < 0) throw ConfigError("minibatch_size must be >= 0");
  if (!(fit.beta1 >= 0.0 && fit.beta1 < 1.0) ||
      !(fit.beta2 >= 0.0 && fit.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(fit.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (fit.segment_steps < 1) throw ConfigError("segment_steps must be >= 1");
  if (fit.threads < 1) throw ConfigError("threads must be >= 1");
  if (!(fit.param_floors.armature >= kArmatureFloor) ||
      !(fit.param_floors.damping >= 0.0) ||
      !(fit.param_floors.frictionloss >= 0.0)) {
    throw ConfigError("parameter floors must respect the physical bounds");
  }
  const MotorParams& p = fit.initial_params;
  if (p.armature < fit.param_floors.armature ||
      p.damping < fit.param_floors.damping ||
      p.frictionloss < fit.param_floors.frictionloss) {
    throw ConfigError("initial parameters lie below their floors");
  }
}

double FitReport::LossReduction() const {
  if (initial_loss == 0.0) return 0.0;
  return 1.0 - best_loss / initial_loss;
}

FitReport Fit(const SegmentBatch& train, const PlantConfig& cfg,
              const FitConfig& fit) {
  Validate(cfg);
  Validate(fit);
  if (train.segments.empty()) throw ConfigError("training batch is empty");
  const auto start = std::chrono::steady_clock::now();

  const std::span<const Segment> segments(train.segments);
  const MotorParams& layout = fit.initial_params;
  Optimizer optimizer(fit, MakeSettings(layout, fit));
  std::vector<double> x = FlattenParams(layout);
  MotorParams params = layout;

  const bool full_batch =
      fit.minibatch_size == 0 ||
      static_cast<std::size_t>(fit.minibatch_size) >= segments.size();
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(fit.seed);

  FitReport report;
  report.initial_params = layout;
  auto record = [&](int epoch, double loss) {
    if (!std::isfinite(loss)) ThrowEpochDivergence(epoch, params, "non-finite loss");
    report.history.push_back(
        {epoch, loss, params.armature, params.damping, params.frictionloss});
    if (epoch == 0 || loss < report.best_loss) {
      report.best_loss = loss;
      report.best_epoch = epoch;
      report.best_params = params;
    }
  };
  auto full_loss = [&](int epoch) {
    try {
      return TotalLoss(segments, params, cfg, fit.integrator, fit.threads);
    } catch (const DivergenceError& e) {
      ThrowEpochDivergence(epoch, params, e.what());
    }
  };

  for (int epoch = 0; epoch < fit.epochs; ++epoch) {
    if (full_batch) {
      LossGradient lg;
      try {
        lg = TotalLossGrad(segments, params, cfg, fit.integrator, fit.threads);
      } catch (const DivergenceError& e) {
        ThrowEpochDivergence(epoch, params, e.what());
      }
      record(epoch, lg.loss);
      for (double g : lg.grad.Flatten()) {
        if (!std::isfinite(g)) ThrowEpochDivergence(epoch, params, "non-finite gradient");
      }
      optimizer.Update(x, lg.grad.Flatten());
      params = UnflattenParams(layout, x);
      continue;
    }
    record(epoch, full_loss(epoch));
    // Fisher-Yates with the portable generator.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(
          shuffle_rng.UniformInt(0, static_cast<std::int64_t>(i - 1)));
      std::swap(order[i - 1], order[j]);
    }
    const auto mb = static_cast<std::size_t>(fit.minibatch_size);
    for (std::size_t begin = 0; begin < order.size(); begin += mb) {
      const std::size_t end = std::min(order.size(), begin + mb);
      LossGradient lg;
      try {
        lg = SubsetLossGrad(segments,
                            std::span(order).subspan(begin, end - begin),
                            params, cfg, fit.integrator);
      } catch (const DivergenceError& e) {
        ThrowEpochDivergence(epoch, params, e.what());
      }
      optimizer.Update(x, lg.grad.Flatten());
      params = UnflattenParams(layout, x);
    }
  }
  record(fit.epochs, full_loss(fit.epochs));
  report.initial_loss = report.history.front().loss;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

EvalReport Evaluate(const TrajectoryDataset& test, const MotorParams& params,
                    const MotorParams& baseline, const PlantConfig& cfg,
                    IntegratorKind kind) {
  Validate(cfg);
  test.Validate();
  if (test.size() < 2) throw ConfigError("test set needs at least two samples");
  EvalReport report;
  report.timestamps = test.timestamps;
  report.optimized = TraceModel(test, params, cfg, kind);
  report.baseline = TraceModel(test, baseline, cfg, kind);
  const auto& opt = report.optimized.mse_q;
  const auto& base = report.baseline.mse_q;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (opt && base) {
    if (*opt == 0.0) {
      report.mse_ratio = *base == 0.0 ? 1.0 : kInf;
    } else {
      report.mse_ratio = *base / *opt;
    }
  } else if (opt) {
    report.mse_ratio = kInf;
  } else if (base) {
    report.mse_ratio = 0.0;
  }
  return report;
}

}  // namespace motorid
