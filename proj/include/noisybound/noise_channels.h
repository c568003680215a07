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

#ifndef NOISYBOUND_NOISE_CHANNELS_H_
#define NOISYBOUND_NOISE_CHANNELS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisybound/linalg.h"
#include "noisybound/rng.h"

namespace noisybound {

enum class NoiseKind { kGaussian, kLaplace, kUniform };

// Standard i.i.d. noise N for the additive channel x -> x + m N, together with
// the norm in which distances are measured. Gaussian pairs with L2 and Laplace
// with L1; Uniform (on [-1, 1]) is scalar, so either norm is accepted.
class NoiseModel {
 public:
  explicit NoiseModel(NoiseKind kind);
  NoiseModel(NoiseKind kind, Norm norm);

  static NoiseModel Gaussian() { return NoiseModel(NoiseKind::kGaussian); }
  static NoiseModel Laplace() { return NoiseModel(NoiseKind::kLaplace); }
  static NoiseModel Uniform() { return NoiseModel(NoiseKind::kUniform); }

  NoiseKind kind() const { return kind_; }
  Norm norm() const { return norm_; }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  NoiseKind kind_;
  Norm norm_;
};

enum class DivergenceKind { kKL, kTV, kChi2 };

// Whether a returned value is the quantity itself or only an upper bound on it.
enum class Exactness { kExact, kUpperBound };

struct ChannelValue {
  double value = 0.0;
  Exactness exactness = Exactness::kExact;
};

std::string_view ToString(NoiseKind kind);
std::string_view ToString(DivergenceKind kind);
std::string_view ToString(Exactness e);
NoiseKind ParseNoiseKind(std::string_view s);
DivergenceKind ParseDivergenceKind(std::string_view s);

// Gaussian complementary CDF, 1 - Phi(x).
double GaussianCcdf(double x);

// Dobrushin coefficient delta(A, m): the largest total variation between the
// outputs of x + mN and x' + mN over inputs with ||x - x'|| <= A. A may be
// +infinity, giving 1. The Laplace value is an upper bound.
ChannelValue Delta(const NoiseModel& noise, double A, double m);

// C_f(x, x'; m) = D_f(P_{x+mN} || P_{x'+mN}), closed form or closed-form
// upper bound. May be +infinity (Uniform KL / chi^2 off the diagonal).
ChannelValue Cost(DivergenceKind f, const NoiseModel& noise,
                  std::span<const double> x, std::span<const double> x_prime,
                  double m);

// Same as Cost for scalar inputs, where only the shift x' - x matters.
ChannelValue Cost1d(DivergenceKind f, const NoiseModel& noise, double shift,
                    double m);

// Exact one-dimensional divergence D_f(P_{mN} || P_{shift+mN}). Throws
// std::domain_error for combinations without a known closed form (Laplace TV).
double CostExact1d(DivergenceKind f, const NoiseModel& noise, double shift,
                   double m);

struct QuadratureSpec {
  // Half-width of the integration window, in noise scale units, added on both
  // sides of [min(0, shift), max(0, shift)].
  double range_scale_units = 40.0;
  // Successive doublings stop once the estimate moves by less than this.
  double tolerance = 1e-9;
  int initial_intervals = 64;
  int max_doublings = 22;
};

// Numerical D_f(P_{0+mN} || P_{shift+mN}) by composite Simpson quadrature on
// the noise densities, split at the kinks and jumps of the integrand. Throws
// std::runtime_error when the doubling sequence does not converge.
double OracleDivergence1d(DivergenceKind f, const NoiseModel& noise,
                          double shift, double m,
                          const QuadratureSpec& spec = {});

// dim i.i.d. standard draws of the noise family.
std::vector<double> SampleNoise(const NoiseModel& noise, size_t dim, Rng& rng);

}  // namespace noisybound

#endif  // NOISYBOUND_NOISE_CHANNELS_H_
