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

#include "noisybound/stat_estimators.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace noisybound {
namespace {

void RequireTwoRows(const GradientSampleSet& set) {
  if (set.samples.rows() < 2) {
    throw std::invalid_argument("gradient statistics need at least 2 samples, got " +
                                std::to_string(set.samples.rows()));
  }
}

std::vector<double> CenterOf(const Matrix& m, Center center) {
  return center == Center::kMean ? ColumnMeans(m) : ColumnLowerMedians(m);
}

}  // namespace

double Variance(const GradientSampleSet& set) {
  RequireTwoRows(set);
  const Matrix& g = set.samples;
  const std::vector<double> mean = ColumnMeans(g);
  double total = 0.0;
  for (size_t r = 0; r < g.rows(); ++r) {
    for (size_t c = 0; c < g.cols(); ++c) {
      const double d = g(r, c) - mean[c];
      total += d * d;
    }
  }
  return total / static_cast<double>(g.rows());
}

double Mmae(const GradientSampleSet& set) {
  return CenteredNormMean(set, Norm::kL1, Center::kMedian);
}

double CenteredNormMean(const GradientSampleSet& set, Norm norm, Center center) {
  RequireTwoRows(set);
  const std::vector<double> e = CenterOf(set.samples, center);
  double total = 0.0;
  for (size_t r = 0; r < set.samples.rows(); ++r) {
    total += DistanceOf(set.samples.row(r), e, norm);
  }
  return total / static_cast<double>(set.samples.rows());
}

double CenteredSqrtNormMean(const GradientSampleSet& set, Norm norm,
                            Center center) {
  RequireTwoRows(set);
  const std::vector<double> e = CenterOf(set.samples, center);
  double total = 0.0;
  for (size_t r = 0; r < set.samples.rows(); ++r) {
    total += std::sqrt(DistanceOf(set.samples.row(r), e, norm));
  }
  return total / static_cast<double>(set.samples.rows());
}

ExpMoment ExpMomentOf(const GradientSampleSet& set, Norm norm, double scale,
                      bool squared, Center center) {
  RequireTwoRows(set);
  if (!(scale >= 0.0)) throw std::invalid_argument("scale must be nonnegative");
  const std::vector<double> e = CenterOf(set.samples, center);
  // Mean of expm1 keeps precision when scale * norm is tiny.
  double total = 0.0;
  for (size_t r = 0; r < set.samples.rows(); ++r) {
    const double d = DistanceOf(set.samples.row(r), e, norm);
    total += std::expm1(scale * (squared ? d * d : d));
  }
  const double value = total / static_cast<double>(set.samples.rows());
  if (std::isinf(value)) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {value, false};
}

void Validate(const LossAssumption& assumption) {
  if (const auto* s = std::get_if<SubGaussian>(&assumption); s && !(s->sigma > 0)) {
    throw std::invalid_argument("sub-Gaussian sigma must be positive");
  }
  if (const auto* b = std::get_if<Bounded>(&assumption); b && !(b->A > 0)) {
    throw std::invalid_argument("loss bound A must be positive");
  }
  if (const auto* v = std::get_if<FiniteVariance>(&assumption);
      v && !(v->sigma_squared >= 0)) {
    throw std::invalid_argument("loss variance must be nonnegative");
  }
}

double ImpliedSubGaussian(const LossAssumption& assumption) {
  Validate(assumption);
  if (const auto* s = std::get_if<SubGaussian>(&assumption)) return s->sigma;
  if (const auto* b = std::get_if<Bounded>(&assumption)) return b->A / 2.0;
  throw std::invalid_argument(
      "a finite-variance assumption carries no sub-Gaussian constant");
}

double LossVariance(std::span<const double> losses) {
  if (losses.size() < 2) {
    throw std::invalid_argument("loss variance needs at least 2 losses");
  }
  double mean = 0.0;
  for (double l : losses) mean += l;
  mean /= static_cast<double>(losses.size());
  double total = 0.0;
  for (double l : losses) total += (l - mean) * (l - mean);
  return total / static_cast<double>(losses.size());
}

}  // namespace noisybound
