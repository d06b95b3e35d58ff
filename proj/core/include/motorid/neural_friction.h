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

#ifndef MOTORID_NEURAL_FRICTION_H_
#define MOTORID_NEURAL_FRICTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace motorid {

// One-hidden-layer tanh perceptron mapping joint velocity to friction torque.
//
// With x = v / input_scale, the raw network is
//
//   f(x) = sum_j out_j * tanh(gain_j * x + bias_j) + out_bias
//
// and the head returns the odd part (f(x) - f(-x)) / 2, so it produces no
// torque at rest for any weights. The flat weight layout is
//
//   [gain_0 .. gain_{H-1}, bias_0 .. bias_{H-1}, out_0 .. out_{H-1}, out_bias]
//
// out_bias cancels in the odd part; it is kept so the layout matches a plain
// 1-H-1 perceptron and always receives a zero gradient.
class NeuralFrictionHead {
 public:
  static constexpr int kDefaultHidden = 16;
  static constexpr double kInitRange = 0.1;

  // Throws ConfigError if hidden < 1, input_scale <= 0, the weight count does
  // not match 3 * hidden + 1, or any weight is non-finite.
  NeuralFrictionHead(int hidden, double input_scale,
                     std::vector<double> weights);

  static NeuralFrictionHead Zeros(int hidden = kDefaultHidden,
                                  double input_scale = 1.0);
  // Weights uniform in [-kInitRange, kInitRange].
  static NeuralFrictionHead Random(std::uint64_t seed,
                                   int hidden = kDefaultHidden,
                                   double input_scale = 1.0);

  static constexpr std::size_t WeightCount(int hidden) {
    return 3 * static_cast<std::size_t>(hidden) + 1;
  }

  int hidden() const { return hidden_; }
  double input_scale() const { return input_scale_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }

  double Torque(double v) const;
  // d Torque / d v.
  double TorqueDerivative(double v) const;
  // grad[k] += scale * d Torque(v) / d weight_k.
  void AccumulateWeightGradient(double v, double scale,
                                std::span<double> grad) const;

  friend bool operator==(const NeuralFrictionHead&,
                         const NeuralFrictionHead&) = default;

 private:
  int hidden_;
  double input_scale_;
  std::vector<double> weights_;
};

struct PrefitOptions {
  int hidden = NeuralFrictionHead::kDefaultHidden;
  double input_scale = 1.0;
  // Hidden gains are log-spaced over [min_gain, max_gain] in normalized
  // input units; a wide span lets the head represent both the viscous slope
  // and a sharp Coulomb step.
  double min_gain = 0.05;
  double max_gain = 2000.0;
};

// Supervised offline fit of a head to (velocity, torque) samples. Hidden
// gains are fixed on a log grid with zero biases, and the output weights are
// the linear least-squares solution. Used to seed or sanity-check a head; the
// identification pipeline itself never sees torque labels.
NeuralFrictionHead PrefitHead(std::span<const double> velocities,
                              std::span<const double> torques,
                              const PrefitOptions& options = {});

}  // namespace motorid

#endif  // MOTORID_NEURAL_FRICTION_H_
