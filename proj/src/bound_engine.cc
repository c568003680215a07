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

#include "noisybound/bound_engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <variant>

namespace noisybound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr size_t kAllPairsLimit = 64;
constexpr size_t kSampledPairs = 2048;

void Finish(BoundReport& report) {
  report.total = 0.0;
  for (double term : report.per_iteration_terms) report.total += term;
  if (std::isinf(report.total)) report.exactness = Exactness::kUpperBound;
}

// sqrt(x * q) with sqrt(inf * q) = inf for q > 0.
double SqrtProduct(double x, double q) {
  if (std::isinf(x)) return q > 0.0 ? kInf : 0.0;
  return std::sqrt(x * q);
}

double Product(double x, double q) {
  if (std::isinf(x)) return q > 0.0 ? kInf : 0.0;
  return x * q;
}

// Constant learning rate of a DP-SGD record, checking m_t = eta.
double ConstantEta(const TrajectoryRecord& record) {
  if (record.T() == 0) return 0.0;
  const double eta = record.iterations.front().config.eta;
  for (const IterationRecord& it : record.iterations) {
    if (std::abs(it.config.eta - eta) > 1e-12 * eta) {
      throw std::invalid_argument("DP-SGD bounds need a constant learning rate");
    }
    if (std::abs(it.config.m - eta) > 1e-12 * eta) {
      throw std::invalid_argument("DP-SGD bounds need noise magnitude m_t = eta");
    }
  }
  return eta;
}

// The per-iteration contraction q = delta(D + 2 eta K, eta), or 1 when D or K
// is unbounded.
ChannelValue DpSgdContraction(const TrajectoryRecord& record, double eta) {
  const double D = record.domain.Diameter(record.noise.norm(), record.dim);
  const double K = record.clip.value_or(kInf);
  if (std::isinf(D) || std::isinf(K) || eta <= 0.0) return {1.0, Exactness::kExact};
  return Delta(record.noise, D + 2.0 * eta * K, eta);
}

void RequireWithoutReplacement(const TrajectoryRecord& record) {
  if (record.schedule_kind == ScheduleKind::kWithReplacement) {
    throw std::invalid_argument(
        "this bound needs sampling without replacement; use the SGLD bound for "
        "records with a reused mini-batch partition");
  }
}

void RequirePartition(const TrajectoryRecord& record) {
  if (record.schedule_kind != ScheduleKind::kWithReplacement ||
      record.partition.empty()) {
    throw std::invalid_argument("SGLD bounds need a mini-batch partition");
  }
  for (const IterationRecord& it : record.iterations) {
    if (!it.config.batch_index) {
      throw std::invalid_argument("SGLD record lacks mini-batch indices");
    }
  }
}

double SgldSigma(const BoundSpec& spec) {
  ValidateBoundSpec(spec);
  if (spec.divergence != DivergenceKind::kKL) {
    throw std::invalid_argument("SGLD bounds are KL bounds");
  }
  return ImpliedSubGaussian(spec.assumption);
}

}  // namespace

void ValidateBoundSpec(const BoundSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("bound needs n >= 1");
  Validate(spec.assumption);
  const bool bounded = std::holds_alternative<Bounded>(spec.assumption);
  const bool ok =
      bounded ||
      (spec.divergence == DivergenceKind::kKL &&
       std::holds_alternative<SubGaussian>(spec.assumption)) ||
      (spec.divergence == DivergenceKind::kChi2 &&
       std::holds_alternative<FiniteVariance>(spec.assumption));
  if (!ok) {
    throw std::invalid_argument(std::string(ToString(spec.divergence)) +
                                " bound is not licensed by this loss assumption");
  }
}

double BoundScale(const BoundSpec& spec) {
  ValidateBoundSpec(spec);
  switch (spec.divergence) {
    case DivergenceKind::kKL:
      return ImpliedSubGaussian(spec.assumption);
    case DivergenceKind::kTV:
      return std::get<Bounded>(spec.assumption).A;
    case DivergenceKind::kChi2:
      if (const auto* v = std::get_if<FiniteVariance>(&spec.assumption)) {
        return std::sqrt(v->sigma_squared);
      }
      return std::get<Bounded>(spec.assumption).A / 2.0;
  }
  return 0.0;
}

std::vector<double> DecayProducts(const TrajectoryRecord& record) {
  return DecayProducts(record, record.T());
}

std::vector<double> DecayProducts(const TrajectoryRecord& record, size_t T) {
  if (T > record.T()) throw std::out_of_range("prefix longer than record");
  std::vector<double> q(T, 1.0);
  const double D = record.domain.Diameter(record.noise.norm(), record.dim);
  const double K = record.clip.value_or(kInf);
  if (std::isinf(D) || std::isinf(K)) return q;
  for (size_t t = T; t-- > 1;) {
    const IterationConfig& next = record.iterations[t].config;
    q[t - 1] = q[t] * Delta(record.noise, D + 2.0 * next.eta * K, next.m).value;
  }
  return q;
}

double DecayProduct(const TrajectoryRecord& record, size_t t) {
  if (t == 0 || t > record.T()) throw std::out_of_range("iteration out of range");
  return DecayProducts(record)[t - 1];
}

ChannelValue PairCostEstimate(const GradientSampleSet& set, DivergenceKind f,
                              const NoiseModel& noise, double m, Rng& rng) {
  const size_t n = set.samples.rows();
  if (n < 2) throw std::invalid_argument("pair cost needs at least 2 samples");
  ChannelValue out;
  double sum = 0.0;
  size_t count = 0;
  auto add = [&](size_t i, size_t j) {
    const ChannelValue c = Cost(f, noise, set.samples.row(i), set.samples.row(j), m);
    if (c.exactness == Exactness::kUpperBound) out.exactness = Exactness::kUpperBound;
    sum += c.value;
    ++count;
  };
  if (n <= kAllPairsLimit) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (i != j) add(i, j);
      }
    }
  } else {
    std::uniform_int_distribution<size_t> first(0, n - 1), second(0, n - 2);
    for (size_t k = 0; k < kSampledPairs; ++k) {
      const size_t i = first(rng);
      size_t j = second(rng);
      if (j >= i) ++j;
      add(i, j);
    }
  }
  out.value = sum / static_cast<double>(count);
  return out;
}

BoundReport GenericBoundFromCosts(std::span<const ChannelValue> costs,
                                  std::span<const size_t> batch_sizes,
                                  std::span<const double> decay,
                                  const BoundSpec& spec) {
  if (costs.size() != batch_sizes.size() || costs.size() != decay.size()) {
    throw std::invalid_argument("per-iteration inputs differ in length");
  }
  const double scale = BoundScale(spec);
  const double n = static_cast<double>(spec.n);
  BoundReport report;
  for (size_t t = 0; t < costs.size(); ++t) {
    const double q = spec.use_decay ? decay[t] : 1.0;
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("decay factor outside [0,1]");
    const double b = static_cast<double>(batch_sizes[t]);
    const double c = costs[t].value;
    if (costs[t].exactness == Exactness::kUpperBound) {
      report.exactness = Exactness::kUpperBound;
    }
    double term = 0.0;
    switch (spec.divergence) {
      case DivergenceKind::kKL:
        term = std::sqrt(2.0) * scale / n * b * SqrtProduct(c, q);
        break;
      case DivergenceKind::kTV:
        term = scale / n * b * Product(c, q);
        break;
      case DivergenceKind::kChi2:
        term = scale / n * b * SqrtProduct(c, q);
        break;
    }
    report.per_iteration_terms.push_back(term);
    report.decay_factors.push_back(q);
  }
  Finish(report);
  return report;
}

std::vector<ChannelValue> GenericCosts(const TrajectoryRecord& record,
                                       DivergenceKind f, uint64_t pair_seed) {
  std::vector<ChannelValue> costs;
  for (const IterationRecord& it : record.iterations) {
    if (!it.samples) {
      throw std::invalid_argument("generic bound needs retained gradient samples");
    }
    if (!(it.config.eta > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    Rng rng = DeriveRng(pair_seed, streams::kPairs, it.config.t);
    const double m = it.config.m * static_cast<double>(it.config.b) / it.config.eta;
    costs.push_back(PairCostEstimate(*it.samples, f, record.noise, m, rng));
  }
  return costs;
}

BoundReport GenericBound(const TrajectoryRecord& record, const BoundSpec& spec,
                         uint64_t pair_seed) {
  ValidateBoundSpec(spec);
  RequireWithoutReplacement(record);
  const std::vector<ChannelValue> costs =
      GenericCosts(record, spec.divergence, pair_seed);
  std::vector<size_t> batch_sizes;
  for (const IterationRecord& it : record.iterations) {
    batch_sizes.push_back(it.config.b);
  }
  return GenericBoundFromCosts(costs, batch_sizes, DecayProducts(record), spec);
}

BoundReport DpSgdBoundGaussian(const TrajectoryRecord& record,
                               const BoundSpec& spec) {
  if (record.noise.kind() != NoiseKind::kGaussian) {
    throw std::invalid_argument("Gaussian DP-SGD bound needs Gaussian noise");
  }
  RequireWithoutReplacement(record);
  const double scale = BoundScale(spec);
  const double eta = ConstantEta(record);
  const double q = spec.use_decay ? DpSgdContraction(record, eta).value : 1.0;
  const double n = static_cast<double>(spec.n);
  const size_t T = record.T();
  BoundReport report;
  for (size_t t = 1; t <= T; ++t) {
    const GradientStats& s = record.iterations[t - 1].stats;
    const double qp = std::pow(q, static_cast<double>(T - t));
    double term = 0.0;
    switch (spec.divergence) {
      case DivergenceKind::kKL:
        term = 2.0 * scale / n * SqrtProduct(s.variance, qp);
        break;
      case DivergenceKind::kTV:
        term = scale / n * Product(s.l2_centered_mean, qp);
        break;
      case DivergenceKind::kChi2:
        term = scale / n * SqrtProduct(s.exp_l2_squared.value, qp);
        break;
    }
    report.per_iteration_terms.push_back(term);
    report.decay_factors.push_back(qp);
  }
  Finish(report);
  return report;
}

BoundReport DpSgdBoundLaplace(const TrajectoryRecord& record,
                              const BoundSpec& spec) {
  if (record.noise.kind() != NoiseKind::kLaplace) {
    throw std::invalid_argument("Laplace DP-SGD bound needs Laplace noise");
  }
  RequireWithoutReplacement(record);
  const double scale = BoundScale(spec);
  const double eta = ConstantEta(record);
  BoundReport report;
  // The Laplace contraction coefficient is itself an upper bound.
  report.exactness = Exactness::kUpperBound;
  const double q = spec.use_decay ? DpSgdContraction(record, eta).value : 1.0;
  const double n = static_cast<double>(spec.n);
  const size_t T = record.T();
  for (size_t t = 1; t <= T; ++t) {
    const IterationRecord& it = record.iterations[t - 1];
    const GradientStats& s = it.stats;
    const double b = static_cast<double>(it.config.b);
    const double qp = std::pow(q, static_cast<double>(T - t));
    double term = 0.0;
    switch (spec.divergence) {
      case DivergenceKind::kKL:
        term = 2.0 * scale / n * SqrtProduct(b * s.mmae, qp);
        break;
      case DivergenceKind::kTV:
        term = std::sqrt(2.0) * scale / n * std::sqrt(b) *
               Product(s.sqrt_l1_centered_mean, qp);
        break;
      case DivergenceKind::kChi2:
        term = scale / n * SqrtProduct(b * s.exp_l1.value, qp);
        break;
    }
    report.per_iteration_terms.push_back(term);
    report.decay_factors.push_back(qp);
  }
  Finish(report);
  return report;
}

double SgldInformationIncrement(double beta, double eta, double variance,
                                size_t b) {
  if (b == 0) throw std::invalid_argument("batch size must be positive");
  const double bb = static_cast<double>(b);
  if (variance == 0.0) return 0.0;
  return beta * eta * variance / (4.0 * bb * bb);
}

BoundReport SgldBound(const TrajectoryRecord& record, const BoundSpec& spec) {
  const double sigma = SgldSigma(spec);
  RequirePartition(record);
  const size_t b = record.partition.front().size();
  const double n = static_cast<double>(spec.n);
  // Per block: the information every one of its examples leaks, summed over the
  // iterations that used the block.
  std::map<size_t, double> information;
  for (size_t j = 0; j < record.partition.size(); ++j) information[j] = 0.0;
  for (const IterationRecord& it : record.iterations) {
    information[*it.config.batch_index] += SgldInformationIncrement(
        it.config.beta, it.config.eta, it.stats.variance, b);
  }
  BoundReport report;
  for (const auto& [block, info] : information) {
    // Each of the b examples contributes sqrt(2 sigma^2 I) / n.
    const double per_example = std::isinf(info) ? kInf : std::sqrt(2.0 * sigma * sigma * info);
    report.per_iteration_terms.push_back(static_cast<double>(b) / n * per_example);
  }
  report.decay_factors.assign(record.T(), 1.0);
  Finish(report);
  return report;
}

BoundReport SgldTrajectoryBound(const TrajectoryRecord& record,
                                const BoundSpec& spec) {
  const double sigma = SgldSigma(spec);
  RequirePartition(record);
  const double b = static_cast<double>(record.partition.front().size());
  const double n = static_cast<double>(spec.n);
  double sum_sqrt = 0.0, sum = 0.0;
  BoundReport report;
  std::vector<double> sqrt_terms;
  for (const IterationRecord& it : record.iterations) {
    const double x = it.stats.variance == 0.0
                         ? 0.0
                         : it.config.beta * it.config.eta * it.stats.variance;
    sqrt_terms.push_back(std::sqrt(x));
    sum_sqrt += std::sqrt(x);
    sum += x;
  }
  const double first = sum_sqrt / n;
  const double second = std::sqrt(sum / (b * n));
  const double prefactor = std::sqrt(2.0) * sigma / 2.0;
  if (first <= second) {
    for (double s : sqrt_terms) report.per_iteration_terms.push_back(prefactor * s / n);
    Finish(report);
  } else {
    // The square-root branch does not split into a sum; report its total and
    // each iteration's share of the radicand.
    for (double s : sqrt_terms) {
      report.per_iteration_terms.push_back(
          sum > 0.0 ? prefactor * second * (s * s) / sum : 0.0);
    }
    report.total = prefactor * second;
    if (std::isinf(report.total)) report.exactness = Exactness::kUpperBound;
  }
  report.decay_factors.assign(record.T(), 1.0);
  return report;
}

OrderingReport BoundOrderingCheck(const TrajectoryRecord& record, double A,
                                  double sigma_hat, size_t n, bool use_decay) {
  if (!(A > 0.0)) throw std::invalid_argument("A must be positive");
  if (!(sigma_hat > 0.0) || sigma_hat > A / 2.0) {
    throw std::invalid_argument("ordering check needs 0 < sigma_hat <= A/2");
  }
  OrderingReport out;
  BoundSpec spec{.divergence = DivergenceKind::kTV,
                 .assumption = Bounded{A},
                 .n = n,
                 .use_decay = use_decay};
  out.tv = DpSgdBoundGaussian(record, spec).total;
  spec.divergence = DivergenceKind::kKL;
  spec.assumption = SubGaussian{A / 2.0};
  out.kl = DpSgdBoundGaussian(record, spec).total;
  spec.divergence = DivergenceKind::kChi2;
  spec.assumption = FiniteVariance{sigma_hat * sigma_hat};
  out.chi2 = DpSgdBoundGaussian(record, spec).total;
  constexpr double kSlack = 1e-12;
  out.holds = out.tv <= out.kl * (1.0 + kSlack) &&
              out.kl <= out.chi2 * (1.0 + kSlack) * (A / 2.0) / sigma_hat;
  return out;
}

}  // namespace noisybound
