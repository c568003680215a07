// Copyright 2026 The noisybound Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOISYBOUND_MODEL_H_
#define NOISYBOUND_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "noisybound/linalg.h"
#include "noisybound/rng.h"

namespace noisybound {

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Fully connected classifier with rectifier hidden layers and a softmax
// output. No hidden layers gives multinomial logistic regression.
//
// Parameters are flattened layer by layer: the weight matrix (out x in,
// row-major) followed by the bias vector.
class Model {
 public:
  static Model Logistic(size_t input_dim, size_t classes);
  static Model Mlp(size_t input_dim, std::vector<size_t> hidden, size_t classes);

  size_t input_dim() const { return widths_.front(); }
  size_t classes() const { return widths_.back(); }
  const std::vector<size_t>& widths() const { return widths_; }
  bool is_logistic() const { return widths_.size() == 2; }
  size_t parameter_count() const { return parameter_count_; }
  std::string Describe() const;

  // Logits for one example.
  std::vector<double> Forward(std::span<const double> params,
                              std::span<const double> x) const;
  size_t Predict(std::span<const double> params, std::span<const double> x) const;

  // Cross-entropy loss of one example and its exact gradient by backprop. The
  // rectifier's subgradient at 0 is taken as 0.
  LossAndGrad CrossEntropy(std::span<const double> params,
                           std::span<const double> x, size_t label) const;

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  ParamVector InitFanIn(Rng& rng) const;

 private:
  explicit Model(std::vector<size_t> widths);
  void CheckShapes(std::span<const double> params,
                   std::span<const double> x) const;

  std::vector<size_t> widths_;
  std::vector<size_t> offsets_;  // start of each layer's weights
  size_t parameter_count_ = 0;
};

}  // namespace noisybound

#endif  // NOISYBOUND_MODEL_H_
