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

#include "noisybound/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noisybound {

Model::Model(std::vector<size_t> widths) : widths_(std::move(widths)) {
  for (size_t w : widths_) {
    if (w == 0) throw std::invalid_argument("layer widths must be positive");
  }
  if (widths_.back() < 2) throw std::invalid_argument("need at least 2 classes");
  for (size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(parameter_count_);
    parameter_count_ += widths_[l + 1] * widths_[l] + widths_[l + 1];
  }
}

Model Model::Logistic(size_t input_dim, size_t classes) {
  return Model({input_dim, classes});
}

Model Model::Mlp(size_t input_dim, std::vector<size_t> hidden, size_t classes) {
  std::vector<size_t> widths = {input_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(classes);
  return Model(std::move(widths));
}

std::string Model::Describe() const {
  std::string s = is_logistic() ? "logistic(" : "mlp(";
  for (size_t i = 0; i < widths_.size(); ++i) {
    if (i) s += "-";
    s += std::to_string(widths_[i]);
  }
  return s + ")";
}

void Model::CheckShapes(std::span<const double> params,
                        std::span<const double> x) const {
  if (params.size() != parameter_count_) {
    throw std::invalid_argument("expected " + std::to_string(parameter_count_) +
                                " parameters, got " + std::to_string(params.size()));
  }
  if (x.size() != input_dim()) {
    throw std::invalid_argument("expected input of dimension " +
                                std::to_string(input_dim()) + ", got " +
                                std::to_string(x.size()));
  }
}

std::vector<double> Model::Forward(std::span<const double> params,
                                   std::span<const double> x) const {
  CheckShapes(params, x);
  std::vector<double> a(x.begin(), x.end());
  const size_t layers = widths_.size() - 1;
  for (size_t l = 0; l < layers; ++l) {
    const size_t in = widths_[l], out = widths_[l + 1];
    const double* w = params.data() + offsets_[l];
    const double* b = w + out * in;
    std::vector<double> z(out);
    for (size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (size_t i = 0; i < in; ++i) s += w[o * in + i] * a[i];
      z[o] = (l + 1 < layers) ? std::max(0.0, s) : s;
    }
    a = std::move(z);
  }
  return a;
}

size_t Model::Predict(std::span<const double> params,
                      std::span<const double> x) const {
  const std::vector<double> logits = Forward(params, x);
  return static_cast<size_t>(std::max_element(logits.begin(), logits.end()) -
                             logits.begin());
}

LossAndGrad Model::CrossEntropy(std::span<const double> params,
                                std::span<const double> x, size_t label) const {
  CheckShapes(params, x);
  if (label >= classes()) throw std::invalid_argument("label out of range");
  const size_t layers = widths_.size() - 1;

  // activations[l] is the input to layer l; pre[l] its pre-activation output.
  std::vector<std::vector<double>> activations(layers + 1);
  std::vector<std::vector<double>> pre(layers);
  activations[0].assign(x.begin(), x.end());
  for (size_t l = 0; l < layers; ++l) {
    const size_t in = widths_[l], out = widths_[l + 1];
    const double* w = params.data() + offsets_[l];
    const double* b = w + out * in;
    pre[l].resize(out);
    activations[l + 1].resize(out);
    for (size_t o = 0; o < out; ++o) {
      double s = b[o];
      for (size_t i = 0; i < in; ++i) s += w[o * in + i] * activations[l][i];
      pre[l][o] = s;
      activations[l + 1][o] = (l + 1 < layers) ? std::max(0.0, s) : s;
    }
  }

  // Stable log-softmax.
  const std::vector<double>& logits = activations[layers];
  const double top = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (double z : logits) denom += std::exp(z - top);
  const double log_norm = top + std::log(denom);

  LossAndGrad out;
  out.loss = log_norm - logits[label];
  out.grad.assign(parameter_count_, 0.0);

  std::vector<double> delta(logits.size());
  for (size_t k = 0; k < logits.size(); ++k) {
    delta[k] = std::exp(logits[k] - log_norm) - (k == label ? 1.0 : 0.0);
  }
  for (size_t l = layers; l-- > 0;) {
    const size_t in = widths_[l], o_count = widths_[l + 1];
    const double* w = params.data() + offsets_[l];
    double* gw = out.grad.data() + offsets_[l];
    double* gb = gw + o_count * in;
    const std::vector<double>& a = activations[l];
    for (size_t o = 0; o < o_count; ++o) {
      gb[o] = delta[o];
      for (size_t i = 0; i < in; ++i) gw[o * in + i] = delta[o] * a[i];
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (size_t i = 0; i < in; ++i) {
      if (pre[l - 1][i] <= 0.0) continue;
      double s = 0.0;
      for (size_t o = 0; o < o_count; ++o) s += w[o * in + i] * delta[o];
      prev[i] = s;
    }
    delta = std::move(prev);
  }
  return out;
}

ParamVector Model::InitFanIn(Rng& rng) const {
  ParamVector params(parameter_count_);
  for (size_t l = 0; l + 1 < widths_.size(); ++l) {
    const size_t in = widths_[l], out = widths_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (size_t i = 0; i < out * in + out; ++i) params[offsets_[l] + i] = dist(rng);
  }
  return params;
}

}  // namespace noisybound
