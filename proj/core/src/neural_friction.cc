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

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "motorid/errors.h"
#include "motorid/random.h"

namespace motorid {

NeuralFrictionHead::NeuralFrictionHead(int hidden, double input_scale,
                                       std::vector<double> weights)
    : hidden_(hidden), input_scale_(input_scale), weights_(std::move(weights)) {
  if (hidden_ < 1) {
    throw ConfigError("neural friction head needs at least one hidden unit");
  }
  if (!(input_scale_ > 0.0) || !std::isfinite(input_scale_)) {
    throw ConfigError("neural friction input_scale must be positive");
  }
  if (weights_.size() != WeightCount(hidden_)) {
    throw ConfigError("neural friction head expects " +
                      std::to_string(WeightCount(hidden_)) + " weights, got " +
                      std::to_string(weights_.size()));
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) {
      throw ConfigError("neural friction weights must be finite");
    }
  }
}

NeuralFrictionHead NeuralFrictionHead::Zeros(int hidden, double input_scale) {
  return NeuralFrictionHead(hidden, input_scale,
                            std::vector<double>(WeightCount(hidden), 0.0));
}

NeuralFrictionHead NeuralFrictionHead::Random(std::uint64_t seed, int hidden,
                                              double input_scale) {
  Rng rng(seed);
  std::vector<double> weights(WeightCount(hidden));
  for (double& w : weights) w = rng.Uniform(-kInitRange, kInitRange);
  return NeuralFrictionHead(hidden, input_scale, std::move(weights));
}

double NeuralFrictionHead::Torque(double v) const {
  const double x = v / input_scale_;
  const double* gain = weights_.data();
  const double* bias = gain + hidden_;
  const double* out = bias + hidden_;
  double sum = 0.0;
  for (int j = 0; j < hidden_; ++j) {
    const double plus = std::tanh(gain[j] * x + bias[j]);
    const double minus = std::tanh(-gain[j] * x + bias[j]);
    sum += out[j] * (plus - minus);
  }
  return 0.5 * sum;
}

double NeuralFrictionHead::TorqueDerivative(double v) const {
  const double x = v / input_scale_;
  const double* gain = weights_.data();
  const double* bias = gain + hidden_;
  const double* out = bias + hidden_;
  double sum = 0.0;
  for (int j = 0; j < hidden_; ++j) {
    const double plus = std::tanh(gain[j] * x + bias[j]);
    const double minus = std::tanh(-gain[j] * x + bias[j]);
    sum += out[j] * gain[j] * ((1.0 - plus * plus) + (1.0 - minus * minus));
  }
  return 0.5 * sum / input_scale_;
}

void NeuralFrictionHead::AccumulateWeightGradient(
    double v, double scale, std::span<double> grad) const {
  const double x = v / input_scale_;
  const double* gain = weights_.data();
  const double* bias = gain + hidden_;
  const double* out = bias + hidden_;
  const double half = 0.5 * scale;
  for (int j = 0; j < hidden_; ++j) {
    const double plus = std::tanh(gain[j] * x + bias[j]);
    const double minus = std::tanh(-gain[j] * x + bias[j]);
    const double dplus = 1.0 - plus * plus;
    const double dminus = 1.0 - minus * minus;
    grad[j] += half * out[j] * x * (dplus + dminus);
    grad[hidden_ + j] += half * out[j] * (dplus - dminus);
    grad[2 * hidden_ + j] += half * (plus - minus);
  }
  // out_bias: zero by odd symmetrization.
}

NeuralFrictionHead PrefitHead(std::span<const double> velocities,
                              std::span<const double> torques,
                              const PrefitOptions& options) {
  if (velocities.size() != torques.size() || velocities.empty()) {
    throw ConfigError("prefit needs matching, non-empty sample vectors");
  }
  if (!(options.min_gain > 0.0) || !(options.max_gain >= options.min_gain)) {
    throw ConfigError("prefit gain range must satisfy 0 < min <= max");
  }
  const int hidden = options.hidden;
  NeuralFrictionHead head = NeuralFrictionHead::Zeros(hidden, options.input_scale);
  std::span<double> w = head.mutable_weights();
  const double log_lo = std::log(options.min_gain);
  const double log_hi = std::log(options.max_gain);
  for (int j = 0; j < hidden; ++j) {
    const double frac = hidden == 1 ? 0.0 : static_cast<double>(j) / (hidden - 1);
    w[j] = std::exp(log_lo + frac * (log_hi - log_lo));
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(velocities.size());
  Eigen::MatrixXd features(rows, hidden);
  Eigen::VectorXd target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double x = velocities[i] / options.input_scale;
    for (int j = 0; j < hidden; ++j) features(i, j) = std::tanh(w[j] * x);
    target(i) = torques[i];
  }
  const Eigen::VectorXd out = features.colPivHouseholderQr().solve(target);
  for (int j = 0; j < hidden; ++j) w[2 * hidden + j] = out(j);
  return head;
}

}  // namespace motorid
