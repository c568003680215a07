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

#ifndef NOISYBOUND_STAT_ESTIMATORS_H_
#define NOISYBOUND_STAT_ESTIMATORS_H_

#include <cstddef>
#include <span>
#include <variant>

#include "noisybound/linalg.h"

namespace noisybound {

enum class SampleSource { kInBatch, kHoldOut };

// Per-example update directions g(W_{t-1}, Z_i) at one iteration; one row per
// example.
struct GradientSampleSet {
  Matrix samples;
  size_t iteration = 0;
  SampleSource source = SampleSource::kInBatch;
};

enum class Center { kMean, kMedian };

// Population (divide-by-n) variance summed over coordinates: the minimum over
// a of the empirical E||g - a||_2^2, attained at the column means.
double Variance(const GradientSampleSet& set);

// Minimum mean absolute error: the empirical E||g - a||_1 at the per-column
// lower medians.
double Mmae(const GradientSampleSet& set);

// Empirical E||g - e|| with e the column means or lower medians.
double CenteredNormMean(const GradientSampleSet& set, Norm norm, Center center);

// Empirical E sqrt(||g - e||).
double CenteredSqrtNormMean(const GradientSampleSet& set, Norm norm,
                            Center center);

struct ExpMoment {
  double value = 0.0;  // +infinity when overflowed
  bool overflow = false;
};

// Empirical E[exp(scale * ||g - e||^p)] - 1 with p = 2 when squared, else 1.
ExpMoment ExpMomentOf(const GradientSampleSet& set, Norm norm, double scale,
                      bool squared, Center center);

struct SubGaussian {
  double sigma;
};
struct Bounded {
  double A;
};
struct FiniteVariance {
  double sigma_squared;
};

// Loss-tail assumption that selects which generalization bound applies.
using LossAssumption = std::variant<SubGaussian, Bounded, FiniteVariance>;

// Validates the positivity constraints on sigma / A.
void Validate(const LossAssumption& assumption);

// sigma, or A/2 for a loss bounded in [0, A]. Throws std::invalid_argument for
// FiniteVariance.
double ImpliedSubGaussian(const LossAssumption& assumption);

// Population variance of held-out losses.
double LossVariance(std::span<const double> losses);

}  // namespace noisybound

#endif  // NOISYBOUND_STAT_ESTIMATORS_H_
