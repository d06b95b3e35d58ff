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

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "motorid/errors.h"

namespace motorid {
namespace {

struct Adjoint {
  double q = 0.0;
  double v = 0.0;
};

// Partials of the acceleration at one evaluation point, with the PD torque's
// own state dependence folded in when `fold_pd` is set.
struct AccelPoint {
  AccelLinearization lin;
  double a_q = 0.0;
  double a_v = 0.0;
};

AccelPoint LinearizeAt(const JointState& x, const Action& action,
                       double held_torque, bool use_held,
                       const MotorParams& params, const PlantConfig& cfg) {
  AccelPoint p;
  if (use_held) {
    p.lin = LinearizeAccel(x, held_torque, params, cfg);
    p.a_q = p.lin.d_q;
    p.a_v = p.lin.d_v;
  } else {
    const PdTorqueLinearization pd = LinearizePdTorque(x, action, cfg);
    p.lin = LinearizeAccel(x, pd.torque, params, cfg);
    p.a_q = p.lin.d_q + p.lin.d_pd_torque * pd.d_q;
    p.a_v = p.lin.d_v + p.lin.d_pd_torque * pd.d_v;
  }
  return p;
}

void AccumulateParams(const AccelPoint& p, const JointState& x, double bar_accel,
                      const MotorParams& params, ParamGradient& grad) {
  grad.d_armature += bar_accel * p.lin.d_armature;
  grad.d_damping += bar_accel * p.lin.d_damping;
  grad.d_frictionloss += bar_accel * p.lin.d_frictionloss;
  if (params.neural_friction) {
    params.neural_friction->AccumulateWeightGradient(
        x.v, bar_accel * p.lin.d_neural_scale, grad.d_neural);
  }
}

void CheckSegmentShape(const Segment& segment) {
  if (segment.actions.empty()) throw ConfigError("segment has no actions");
  if (segment.targets.size() != segment.actions.size()) {
    throw ConfigError("segment needs one target per action");
  }
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Exceptions are
// captured per index and the lowest-index one is rethrown.
template <typename Body>
void ParallelFor(std::size_t n, int threads, Body body) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::pair<std::size_t, std::exception_ptr>> failures(workers);
  for (auto& f : failures) f.first = std::numeric_limits<std::size_t>::max();
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
          try {
            body(i);
          } catch (...) {
            failures[w] = {i, std::current_exception()};
            return;
          }
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f.second) std::rethrow_exception(f.second);
  }
}

DivergenceError SegmentDivergence(std::size_t index, const DivergenceError& e) {
  return DivergenceError("segment " + std::to_string(index) + ": " + e.what(),
                         index);
}

}  // namespace

ParamGradient ParamGradient::ZerosLike(const MotorParams& params) {
  ParamGradient g;
  if (params.neural_friction) {
    g.d_neural.assign(params.neural_friction->weights().size(), 0.0);
  }
  return g;
}

ParamGradient& ParamGradient::operator+=(const ParamGradient& other) {
  d_armature += other.d_armature;
  d_damping += other.d_damping;
  d_frictionloss += other.d_frictionloss;
  if (d_neural.size() != other.d_neural.size()) {
    throw ConfigError("cannot add gradients of different layouts");
  }
  for (std::size_t i = 0; i < d_neural.size(); ++i) d_neural[i] += other.d_neural[i];
  return *this;
}

ParamGradient& ParamGradient::operator*=(double scale) {
  d_armature *= scale;
  d_damping *= scale;
  d_frictionloss *= scale;
  for (double& g : d_neural) g *= scale;
  return *this;
}

std::vector<double> ParamGradient::Flatten() const {
  std::vector<double> flat = {d_armature, d_damping, d_frictionloss};
  flat.insert(flat.end(), d_neural.begin(), d_neural.end());
  return flat;
}

std::vector<double> FlattenParams(const MotorParams& params) {
  std::vector<double> flat = {params.armature, params.damping,
                              params.frictionloss};
  if (params.neural_friction) {
    const auto w = params.neural_friction->weights();
    flat.insert(flat.end(), w.begin(), w.end());
  }
  return flat;
}

MotorParams UnflattenParams(const MotorParams& layout,
                            std::span<const double> flat) {
  if (flat.size() != FlattenParams(layout).size()) {
    throw ConfigError("flat parameter vector has the wrong length");
  }
  MotorParams out = layout;
  out.armature = flat[0];
  out.damping = flat[1];
  out.frictionloss = flat[2];
  if (out.neural_friction) {
    std::span<double> w = out.neural_friction->mutable_weights();
    std::copy(flat.begin() + 3, flat.end(), w.begin());
  }
  return out;
}

std::vector<double> ParamLowerBounds(const MotorParams& params) {
  std::vector<double> bounds = {kArmatureFloor, 0.0, 0.0};
  if (params.neural_friction) {
    bounds.resize(3 + params.neural_friction->weights().size(),
                  -std::numeric_limits<double>::infinity());
  }
  return bounds;
}

std::vector<std::string> ParamNames(const MotorParams& params) {
  std::vector<std::string> names = {"armature", "damping", "frictionloss"};
  if (params.neural_friction) {
    for (std::size_t i = 0; i < params.neural_friction->weights().size(); ++i) {
      names.push_back("neural[" + std::to_string(i) + "]");
    }
  }
  return names;
}

JointState StepVjp(const JointState& state, const Action& action,
                   const MotorParams& params, const PlantConfig& cfg,
                   IntegratorKind kind, const JointState& next_adjoint,
                   ParamGradient& grad) {
  const double h = cfg.delta;
  switch (kind) {
    case IntegratorKind::kEuler:
    case IntegratorKind::kSemiImplicitEuler: {
      // Single-point schemes always fold the PD partials in: the torque is
      // evaluated once, at the start of the step.
      const AccelPoint p = LinearizeAt(state, action, 0.0, false, params, cfg);
      double bar_v_next = next_adjoint.v;
      if (kind == IntegratorKind::kSemiImplicitEuler) {
        bar_v_next += h * next_adjoint.q;
      }
      const double bar_accel = h * bar_v_next;
      AccumulateParams(p, state, bar_accel, params, grad);
      JointState bar;
      bar.q = next_adjoint.q + bar_accel * p.a_q;
      bar.v = bar_v_next + bar_accel * p.a_v;
      if (kind == IntegratorKind::kEuler) bar.v += h * next_adjoint.q;
      return bar;
    }
    case IntegratorKind::kRk4: {
      const Rk4Stages s = ComputeRk4Stages(state, action, params, cfg);
      const bool held = cfg.hold_pd_torque;
      // Adjoints of the slopes (dq/dt, dv/dt) at each stage.
      Adjoint bar_k[4];
      const double w[4] = {h / 6.0, h / 3.0, h / 3.0, h / 6.0};
      for (int i = 0; i < 4; ++i) {
        bar_k[i] = {w[i] * next_adjoint.q, w[i] * next_adjoint.v};
      }
      // Offsets of stage i from the step start, in units of the previous slope.
      const double offset[4] = {0.0, 0.5 * h, 0.5 * h, h};
      Adjoint bar_state = {next_adjoint.q, next_adjoint.v};
      double bar_torque = 0.0;
      for (int i = 3; i >= 0; --i) {
        const JointState& x = s.stage[i];
        const AccelPoint p =
            LinearizeAt(x, action, s.pd_torque, held, params, cfg);
        // slope_i = (x.v, accel(x))
        const double bar_accel = bar_k[i].v;
        AccumulateParams(p, x, bar_accel, params, grad);
        if (held) bar_torque += bar_accel * p.lin.d_pd_torque;
        const Adjoint bar_x = {bar_accel * p.a_q, bar_k[i].q + bar_accel * p.a_v};
        bar_state.q += bar_x.q;
        bar_state.v += bar_x.v;
        if (i > 0) {
          bar_k[i - 1].q += offset[i] * bar_x.q;
          bar_k[i - 1].v += offset[i] * bar_x.v;
        }
      }
      if (held) {
        const PdTorqueLinearization pd = LinearizePdTorque(state, action, cfg);
        bar_state.q += bar_torque * pd.d_q;
        bar_state.v += bar_torque * pd.d_v;
      }
      return {bar_state.q, bar_state.v};
    }
  }
  return {};
}

double SegmentLoss(const Segment& segment, const MotorParams& params,
                   const PlantConfig& cfg, IntegratorKind kind) {
  CheckSegmentShape(segment);
  JointState x = segment.initial;
  double loss = 0.0;
  for (std::size_t i = 0; i < segment.actions.size(); ++i) {
    x = Step(x, segment.actions[i], params, cfg, kind);
    const double eq = x.q - segment.targets[i].q;
    const double ev = x.v - segment.targets[i].v;
    loss += eq * eq + ev * ev;
  }
  return loss;
}

LossGradient SegmentLossGrad(const Segment& segment, const MotorParams& params,
                             const PlantConfig& cfg, IntegratorKind kind) {
  CheckSegmentShape(segment);
  const std::size_t n = segment.actions.size();
  std::vector<JointState> states;
  states.reserve(n + 1);
  states.push_back(segment.initial);
  LossGradient out;
  out.grad = ParamGradient::ZerosLike(params);
  for (std::size_t i = 0; i < n; ++i) {
    states.push_back(Step(states.back(), segment.actions[i], params, cfg, kind));
    const double eq = states.back().q - segment.targets[i].q;
    const double ev = states.back().v - segment.targets[i].v;
    out.loss += eq * eq + ev * ev;
  }
  JointState bar{0.0, 0.0};
  for (std::size_t i = n; i-- > 0;) {
    // residual term of states[i + 1]
    bar.q += 2.0 * (states[i + 1].q - segment.targets[i].q);
    bar.v += 2.0 * (states[i + 1].v - segment.targets[i].v);
    bar = StepVjp(states[i], segment.actions[i], params, cfg, kind, bar,
                  out.grad);
  }
  return out;
}

double TotalLoss(std::span<const Segment> batch, const MotorParams& params,
                 const PlantConfig& cfg, IntegratorKind kind, int threads) {
  if (batch.empty()) throw ConfigError("segment batch is empty");
  Validate(cfg);
  Validate(params);
  std::vector<double> losses(batch.size());
  ParallelFor(batch.size(), threads, [&](std::size_t j) {
    try {
      losses[j] = SegmentLoss(batch[j], params, cfg, kind);
    } catch (const DivergenceError& e) {
      throw SegmentDivergence(j, e);
    }
  });
  double total = 0.0;
  for (double l : losses) total += l;
  return total;
}

LossGradient TotalLossGrad(std::span<const Segment> batch,
                           const MotorParams& params, const PlantConfig& cfg,
                           IntegratorKind kind, int threads) {
  if (batch.empty()) throw ConfigError("segment batch is empty");
  Validate(cfg);
  Validate(params);
  std::vector<LossGradient> parts(batch.size());
  ParallelFor(batch.size(), threads, [&](std::size_t j) {
    try {
      parts[j] = SegmentLossGrad(batch[j], params, cfg, kind);
    } catch (const DivergenceError& e) {
      throw SegmentDivergence(j, e);
    }
  });
  LossGradient total;
  total.grad = ParamGradient::ZerosLike(params);
  for (const LossGradient& part : parts) {
    total.loss += part.loss;
    total.grad += part.grad;
  }
  return total;
}

std::vector<double> FiniteDifferenceGradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> lower_bounds, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (lower_bounds.size() != x.size()) {
    throw ConfigError("lower bounds must match the parameter count");
  }
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  std::optional<double> f0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    auto eval_at = [&](double value) {
      point[i] = value;
      const double result = f(point);
      point[i] = x[i];
      return result;
    };
    if (x[i] - step < lower_bounds[i]) {
      if (!f0) f0 = f(point);
      const double f1 = eval_at(x[i] + step);
      const double f2 = eval_at(x[i] + 2.0 * step);
      grad[i] = (-3.0 * *f0 + 4.0 * f1 - f2) / (2.0 * step);
    } else {
      const double up = eval_at(x[i] + step);
      const double down = eval_at(x[i] - step);
      grad[i] = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

std::vector<double> RiddersGradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, std::span<const double> lower_bounds, double h) {
  constexpr int kStages = 10;
  constexpr double kShrink = 1.4;
  constexpr double kShrink2 = kShrink * kShrink;
  constexpr double kSafe = 2.0;
  constexpr int kStarts = 3;
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (lower_bounds.size() != x.size()) {
    throw ConfigError("lower bounds must match the parameter count");
  }
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double step = h * std::max(1.0, std::abs(x[i]));
    if (std::isfinite(lower_bounds[i])) {
      step = std::min(step, 0.5 * (x[i] - lower_bounds[i]));
    }
    if (!(step > 0.0)) {
      const double s = 1e-6 * std::max(1.0, std::abs(x[i]));
      const double f0 = f(point);
      point[i] = x[i] + s;
      const double f1 = f(point);
      point[i] = x[i] + 2.0 * s;
      const double f2 = f(point);
      point[i] = x[i];
      grad[i] = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * s);
      continue;
    }
    auto central = [&](double s) {
      point[i] = x[i] + s;
      const double up = f(point);
      point[i] = x[i] - s;
      const double down = f(point);
      point[i] = x[i];
      return (up - down) / (2.0 * s);
    };
    double best = 0.0;
    double error = std::numeric_limits<double>::infinity();
    for (int start = 0; start < kStarts; ++start, step /= 10.0) {
      double table[kStages][kStages];
      double s = step;
      table[0][0] = central(s);
      if (start == 0) best = table[0][0];
      for (int col = 1; col < kStages; ++col) {
        s /= kShrink;
        table[0][col] = central(s);
        double factor = kShrink2;
        double col_error = std::numeric_limits<double>::infinity();
        for (int row = 1; row <= col; ++row) {
          table[row][col] =
              (table[row - 1][col] * factor - table[row - 1][col - 1]) /
              (factor - 1.0);
          factor *= kShrink2;
          const double estimate =
              std::max(std::abs(table[row][col] - table[row - 1][col]),
                       std::abs(table[row][col] - table[row - 1][col - 1]));
          col_error = std::min(col_error, estimate);
          if (estimate <= error) {
            error = estimate;
            best = table[row][col];
          }
        }
        if (std::abs(table[col][col] - table[col - 1][col - 1]) >=
            kSafe * col_error) {
          break;
        }
      }
    }
    grad[i] = best;
  }
  return grad;
}

ParamGradient FiniteDiffGrad(std::span<const Segment> batch,
                             const MotorParams& params, const PlantConfig& cfg,
                             IntegratorKind kind, double h,
                             DifferenceScheme scheme) {
  const std::vector<double> x = FlattenParams(params);
  const std::vector<double> bounds = ParamLowerBounds(params);
  auto loss = [&](std::span<const double> z) {
    return TotalLoss(batch, UnflattenParams(params, z), cfg, kind);
  };
  const std::vector<double> flat =
      scheme == DifferenceScheme::kRidders
          ? RiddersGradient(loss, x, bounds, h)
          : FiniteDifferenceGradient(loss, x, bounds, h);
  ParamGradient g = ParamGradient::ZerosLike(params);
  g.d_armature = flat[0];
  g.d_damping = flat[1];
  g.d_frictionloss = flat[2];
  std::copy(flat.begin() + 3, flat.end(), g.d_neural.begin());
  return g;
}

GradientCheck CompareGradients(const MotorParams& layout,
                               const ParamGradient& analytic,
                               const ParamGradient& numeric,
                               const GradientTolerance& tolerance) {
  const std::vector<double> a = analytic.Flatten();
  const std::vector<double> b = numeric.Flatten();
  const std::vector<std::string> names = ParamNames(layout);
  if (a.size() != names.size() || b.size() != names.size()) {
    throw ConfigError("gradient layouts do not match the parameter layout");
  }
  GradientCheck check;
  for (std::size_t i = 0; i < a.size(); ++i) {
    GradientComponentCheck c;
    c.name = names[i];
    c.analytic = a[i];
    c.numeric = b[i];
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    const double diff = std::abs(a[i] - b[i]);
    if (scale < tolerance.tiny) {
      c.absolute = true;
      c.error = diff;
      c.pass = diff < tolerance.absolute;
    } else {
      c.error = diff / scale;
      c.pass = c.error < tolerance.relative;
      check.max_relative_error = std::max(check.max_relative_error, c.error);
    }
    if (!std::isfinite(c.error)) c.pass = false;
    check.pass = check.pass && c.pass;
    check.components.push_back(std::move(c));
  }
  return check;
}

}  // namespace motorid
