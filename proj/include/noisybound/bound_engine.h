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

#ifndef NOISYBOUND_BOUND_ENGINE_H_
#define NOISYBOUND_BOUND_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "noisybound/noise_channels.h"
#include "noisybound/optimizers.h"
#include "noisybound/stat_estimators.h"

namespace noisybound {

// Which bound to evaluate and the loss assumption that licenses it.
struct BoundSpec {
  DivergenceKind divergence = DivergenceKind::kKL;
  LossAssumption assumption = Bounded{1.0};
  size_t n = 1;
  bool use_decay = true;
};

// Throws std::invalid_argument unless n >= 1 and the assumption supports the
// divergence: TV needs Bounded, KL needs SubGaussian or Bounded, chi^2 needs
// FiniteVariance or Bounded.
void ValidateBoundSpec(const BoundSpec& spec);

// The loss-dependent prefactor of a bound: sigma for KL, A for TV, and
// sqrt(Var loss) (A/2 for a bounded loss) for chi^2.
double BoundScale(const BoundSpec& spec);

struct BoundReport {
  double total = 0.0;  // may be +infinity
  // Summands of the total, already multiplied by every prefactor. One per
  // iteration, except for the SGLD bound where there is one per mini-batch.
  std::vector<double> per_iteration_terms;
  // Decay product (or q-power) applied to each iteration.
  std::vector<double> decay_factors;
  // kUpperBound when any channel quantity used is itself only an upper bound,
  // or when the total is infinite.
  Exactness exactness = Exactness::kExact;
};

// prod_{t' = t+1}^{T} delta(D + 2 eta_{t'} K, m_{t'}) for 1 <= t <= T. Equals 1
// when the domain is unbounded or no clip threshold was set.
double DecayProduct(const TrajectoryRecord& record, size_t t);
// All T decay products, computed as suffix products.
std::vector<double> DecayProducts(const TrajectoryRecord& record);
// Decay products of the run stopped after the first T iterations.
std::vector<double> DecayProducts(const TrajectoryRecord& record, size_t T);

// Empirical E C_f(g, g'; m) over ordered pairs of distinct rows: every pair for
// at most 64 rows, otherwise 2048 random pairs drawn from `rng`.
ChannelValue PairCostEstimate(const GradientSampleSet& set, DivergenceKind f,
                              const NoiseModel& noise, double m, Rng& rng);

// Assembles the generic bound from per-iteration expected costs C_t, batch
// sizes b_t, and decay products Q_t.
BoundReport GenericBoundFromCosts(std::span<const ChannelValue> costs,
                                  std::span<const size_t> batch_sizes,
                                  std::span<const double> decay,
                                  const BoundSpec& spec);

// Per-iteration expected costs C_f at noise m_t b_t / eta_t, from the retained
// samples.
std::vector<ChannelValue> GenericCosts(const TrajectoryRecord& record,
                                       DivergenceKind f, uint64_t pair_seed = 0);

// Generic bound of a without-replacement noisy run. Needs retained samples.
// The pair sampling for large snapshots is seeded by `pair_seed`.
BoundReport GenericBound(const TrajectoryRecord& record, const BoundSpec& spec,
                         uint64_t pair_seed = 0);

// DP-SGD with Gaussian noise, m_t = eta. Uses the recorded variance, centered
// L2 norm mean, and E exp(4 ||g - e||^2) - 1.
BoundReport DpSgdBoundGaussian(const TrajectoryRecord& record,
                               const BoundSpec& spec);

// DP-SGD with Laplace noise in the L1 geometry, m_t = eta. Uses mmae,
// E sqrt(||g - median||_1), and E exp(2 ||g - median||_1) - 1.
BoundReport DpSgdBoundLaplace(const TrajectoryRecord& record,
                              const BoundSpec& spec);

// beta * eta * Var / (4 b^2): the per-iteration mutual-information increment
// contributed by one example of a batch of size b whose gradient has per-example
// variance Var.
double SgldInformationIncrement(double beta, double eta, double variance,
                                size_t b);

// SGLD with a fixed mini-batch partition, sub-Gaussian loss (KL specs only).
// The batch-gradient variance is the recorded per-example variance over b.
BoundReport SgldBound(const TrajectoryRecord& record, const BoundSpec& spec);

// The per-iteration form: (sqrt(2) sigma / 2) * min of the two branches.
BoundReport SgldTrajectoryBound(const TrajectoryRecord& record,
                                const BoundSpec& spec);

struct OrderingReport {
  double tv = 0.0;
  double kl = 0.0;
  double chi2 = 0.0;
  bool holds = false;
};

// Evaluates the three Gaussian DP-SGD bounds with sigma = A/2 for KL and the
// given sigma_hat (<= A/2) for chi^2 and checks tv <= kl <= chi2 up to a
// relative slack of 1e-12.
OrderingReport BoundOrderingCheck(const TrajectoryRecord& record, double A,
                                  double sigma_hat, size_t n,
                                  bool use_decay = true);

}  // namespace noisybound

#endif  // NOISYBOUND_BOUND_ENGINE_H_
