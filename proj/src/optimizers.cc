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

#include "noisybound/optimizers.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace noisybound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double BoxBound(const std::vector<double>& v, size_t i) {
  return v.size() == 1 ? v[0] : v[i];
}

void CheckBox(const DomainSpec& d, size_t dim) {
  if ((d.lo.size() != 1 && d.lo.size() != dim) ||
      (d.hi.size() != 1 && d.hi.size() != dim)) {
    throw std::invalid_argument("box bounds do not match dimension " +
                                std::to_string(dim));
  }
}

std::vector<double> MeanRow(const Matrix& m) {
  if (m.rows() == 0) throw std::invalid_argument("empty gradient batch");
  return ColumnMeans(m);
}

// Euclidean projection onto {||w||_1 <= r} by soft thresholding.
ParamVector ProjectL1(std::span<const double> w, double r) {
  ParamVector out(w.begin(), w.end());
  if (L1Norm(w) <= r) return out;
  std::vector<double> a(w.size());
  for (size_t i = 0; i < w.size(); ++i) a[i] = std::abs(w[i]);
  std::sort(a.begin(), a.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    cumulative += a[k];
    const double candidate = (cumulative - r) / static_cast<double>(k + 1);
    if (a[k] > candidate) theta = candidate;
  }
  for (double& x : out) {
    const double mag = std::max(0.0, std::abs(x) - theta);
    x = std::copysign(mag, x);
  }
  return out;
}

}  // namespace

DomainSpec DomainSpec::L2Ball(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  DomainSpec d;
  d.kind = Kind::kL2Ball;
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::L1Ball(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  DomainSpec d;
  d.kind = Kind::kL1Ball;
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::Box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || hi.empty()) throw std::invalid_argument("empty box bounds");
  const size_t n = std::max(lo.size(), hi.size());
  for (size_t i = 0; i < n; ++i) {
    const double l = lo.size() == 1 ? lo[0] : lo.at(i);
    const double h = hi.size() == 1 ? hi[0] : hi.at(i);
    if (!(l <= h) || !std::isfinite(l) || !std::isfinite(h)) {
      throw std::invalid_argument("box needs finite lo <= hi");
    }
  }
  DomainSpec d;
  d.kind = Kind::kBox;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

double DomainSpec::Diameter(Norm norm, size_t dim) const {
  switch (kind) {
    case Kind::kNone:
      return kInf;
    case Kind::kL2Ball:
      return norm == Norm::kL2 ? 2.0 * radius
                               : 2.0 * radius * std::sqrt(static_cast<double>(dim));
    case Kind::kL1Ball:
      return 2.0 * radius;
    case Kind::kBox: {
      CheckBox(*this, dim);
      double l1 = 0.0, l2 = 0.0;
      for (size_t i = 0; i < dim; ++i) {
        const double side = BoxBound(hi, i) - BoxBound(lo, i);
        l1 += side;
        l2 += side * side;
      }
      return norm == Norm::kL1 ? l1 : std::sqrt(l2);
    }
  }
  return kInf;
}

bool DomainSpec::Contains(std::span<const double> w, double tol) const {
  switch (kind) {
    case Kind::kNone:
      return true;
    case Kind::kL2Ball:
      return L2Norm(w) <= radius * (1.0 + tol);
    case Kind::kL1Ball:
      return L1Norm(w) <= radius * (1.0 + tol);
    case Kind::kBox:
      CheckBox(*this, w.size());
      for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] < BoxBound(lo, i) - tol || w[i] > BoxBound(hi, i) + tol) {
          return false;
        }
      }
      return true;
  }
  return true;
}

ParamVector Project(std::span<const double> w, const DomainSpec& domain) {
  ParamVector out(w.begin(), w.end());
  switch (domain.kind) {
    case DomainSpec::Kind::kNone:
      break;
    case DomainSpec::Kind::kL2Ball: {
      const double norm = L2Norm(w);
      if (norm > domain.radius) {
        for (double& x : out) x *= domain.radius / norm;
      }
      break;
    }
    case DomainSpec::Kind::kL1Ball:
      out = ProjectL1(w, domain.radius);
      break;
    case DomainSpec::Kind::kBox:
      CheckBox(domain, w.size());
      for (size_t i = 0; i < out.size(); ++i) {
        out[i] = std::clamp(out[i], BoxBound(domain.lo, i), BoxBound(domain.hi, i));
      }
      break;
  }
  return out;
}

std::vector<double> ClipGradient(std::span<const double> g, double K, Norm norm) {
  if (!(K > 0.0)) throw std::invalid_argument("clip threshold must be positive");
  std::vector<double> out(g.begin(), g.end());
  const double len = NormOf(g, norm);
  if (len > K) {
    for (double& x : out) x *= K / len;
  }
  return out;
}

ParamVector NoisyStep(std::span<const double> w, const GradientSampleSet& grads,
                      const IterationConfig& cfg, const NoiseModel& noise,
                      const DomainSpec& domain, Rng& rng) {
  const std::vector<double> mean = MeanRow(grads.samples);
  CheckSameSize(w, mean);
  if (!(cfg.m >= 0.0)) throw std::invalid_argument("noise magnitude must be >= 0");
  const std::vector<double> n = SampleNoise(noise, w.size(), rng);
  ParamVector next(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    next[i] = w[i] - cfg.eta * mean[i] + cfg.m * n[i];
  }
  return Project(next, domain);
}

ParamVector DpSgdStep(std::span<const double> w, const GradientSampleSet& grads,
                      double eta, const NoiseModel& noise, double K, Norm clip_norm,
                      const DomainSpec& domain, Rng& rng) {
  GradientSampleSet clipped;
  clipped.iteration = grads.iteration;
  clipped.source = grads.source;
  for (size_t r = 0; r < grads.samples.rows(); ++r) {
    clipped.samples.AppendRow(ClipGradient(grads.samples.row(r), K, clip_norm));
  }
  IterationConfig cfg;
  cfg.eta = eta;
  cfg.m = eta;
  cfg.b = grads.samples.rows();
  return NoisyStep(w, clipped, cfg, noise, domain, rng);
}

ParamVector SgldStep(std::span<const double> w, const GradientSampleSet& grads,
                     double eta, double beta, const NoiseModel& noise, Rng& rng) {
  if (noise.kind() != NoiseKind::kGaussian) {
    throw std::invalid_argument("SGLD uses Gaussian noise");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("inverse temperature must be > 0");
  IterationConfig cfg;
  cfg.eta = eta;
  cfg.m = std::sqrt(2.0 * eta / beta);
  cfg.b = grads.samples.rows();
  return NoisyStep(w, grads, cfg, noise, DomainSpec::None(), rng);
}

size_t BatchSchedule::iterations() const {
  return kind == ScheduleKind::kWithoutReplacement ? batches.size()
                                                   : block_of_iteration.size();
}

std::span<const size_t> BatchSchedule::BatchAt(size_t t) const {
  if (t == 0 || t > iterations()) throw std::out_of_range("iteration out of range");
  if (kind == ScheduleKind::kWithoutReplacement) return batches[t - 1];
  return partition[block_of_iteration[t - 1]];
}

BatchSchedule WithoutReplacementSchedule(size_t n, size_t b, size_t T,
                                         uint64_t seed) {
  if (b == 0) throw std::invalid_argument("batch size must be positive");
  if (T * b > n) {
    throw std::invalid_argument(
        "sampling without replacement needs T * b <= n (T=" + std::to_string(T) +
        ", b=" + std::to_string(b) + ", n=" + std::to_string(n) + ")");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = DeriveRng(seed, streams::kSchedule);
  std::shuffle(order.begin(), order.end(), rng);
  BatchSchedule s;
  s.kind = ScheduleKind::kWithoutReplacement;
  for (size_t t = 0; t < T; ++t) {
    s.batches.emplace_back(order.begin() + t * b, order.begin() + (t + 1) * b);
  }
  return s;
}

BatchSchedule SequentialSchedule(size_t n, size_t b, size_t T) {
  if (b == 0) throw std::invalid_argument("batch size must be positive");
  if (T * b > n) throw std::invalid_argument("sequential schedule needs T * b <= n");
  BatchSchedule s;
  for (size_t t = 0; t < T; ++t) {
    std::vector<size_t> batch(b);
    std::iota(batch.begin(), batch.end(), t * b);
    s.batches.push_back(std::move(batch));
  }
  return s;
}

BatchSchedule EpochPartitionSchedule(size_t n, size_t b, size_t epochs,
                                     uint64_t seed) {
  if (b == 0 || b > n) throw std::invalid_argument("need 0 < b <= n");
  if (n % b != 0) {
    throw std::invalid_argument("batch size " + std::to_string(b) +
                                " does not divide n = " + std::to_string(n));
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = DeriveRng(seed, streams::kSchedule);
  std::shuffle(order.begin(), order.end(), rng);
  BatchSchedule s;
  s.kind = ScheduleKind::kWithReplacement;
  const size_t blocks = n / b;
  for (size_t j = 0; j < blocks; ++j) {
    s.partition.emplace_back(order.begin() + j * b, order.begin() + (j + 1) * b);
  }
  std::vector<size_t> visit(blocks);
  for (size_t e = 0; e < epochs; ++e) {
    std::iota(visit.begin(), visit.end(), size_t{0});
    std::shuffle(visit.begin(), visit.end(), rng);
    s.block_of_iteration.insert(s.block_of_iteration.end(), visit.begin(),
                                visit.end());
  }
  return s;
}

double LearningRate::At(size_t t) const {
  if (decay_steps == 0 || t == 0) return initial;
  return initial * std::pow(decay_rate, static_cast<double>(t - 1) /
                                            static_cast<double>(decay_steps));
}

std::string_view ToString(Algorithm a) {
  switch (a) {
    case Algorithm::kNoisy:
      return "noisy";
    case Algorithm::kDpSgd:
      return "dp_sgd";
    case Algorithm::kSgld:
      return "sgld";
  }
  return "?";
}

std::string_view ToString(OutputSelector s) {
  switch (s) {
    case OutputSelector::kLastIterate:
      return "last";
    case OutputSelector::kAverage:
      return "average";
    case OutputSelector::kArgminLoss:
      return "argmin_loss";
  }
  return "?";
}

bool operator==(const GradientStats& a, const GradientStats& b) {
  return a.samples == b.samples && a.variance == b.variance && a.mmae == b.mmae &&
         a.l2_centered_mean == b.l2_centered_mean &&
         a.sqrt_l1_centered_mean == b.sqrt_l1_centered_mean &&
         a.exp_l2_squared.value == b.exp_l2_squared.value &&
         a.exp_l2_squared.overflow == b.exp_l2_squared.overflow &&
         a.exp_l1.value == b.exp_l1.value && a.exp_l1.overflow == b.exp_l1.overflow;
}

bool operator==(const IterationRecord& a, const IterationRecord& b) {
  const bool same_samples =
      a.samples.has_value() == b.samples.has_value() &&
      (!a.samples || (a.samples->samples == b.samples->samples &&
                      a.samples->iteration == b.samples->iteration &&
                      a.samples->source == b.samples->source));
  return a.config == b.config && a.stats == b.stats && same_samples &&
         a.batch_gradient == b.batch_gradient;
}

bool operator==(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  return a.algorithm == b.algorithm && a.schedule_kind == b.schedule_kind &&
         a.partition == b.partition && a.clip == b.clip &&
         a.clip_norm == b.clip_norm && a.domain == b.domain && a.noise == b.noise &&
         a.output == b.output && a.n == b.n && a.dim == b.dim &&
         a.iterations == b.iterations;
}

GradientStats ComputeGradientStats(const GradientSampleSet& set) {
  GradientStats s;
  s.samples = set.samples.rows();
  s.variance = Variance(set);
  s.mmae = Mmae(set);
  s.l2_centered_mean = CenteredNormMean(set, Norm::kL2, Center::kMean);
  s.sqrt_l1_centered_mean = CenteredSqrtNormMean(set, Norm::kL1, Center::kMedian);
  s.exp_l2_squared = ExpMomentOf(set, Norm::kL2, 4.0, true, Center::kMean);
  s.exp_l1 = ExpMomentOf(set, Norm::kL1, 2.0, false, Center::kMedian);
  return s;
}

TrajectoryRecord TrajectoryRecord::Prefix(size_t T) const {
  if (T > iterations.size()) throw std::out_of_range("prefix longer than record");
  TrajectoryRecord out = *this;
  out.iterations.resize(T);
  return out;
}

GradientSampleSet PerExampleGradients(const Model& model,
                                      std::span<const double> w,
                                      const LabeledDataset& data,
                                      std::span<const size_t> ids,
                                      std::optional<double> clip, Norm clip_norm) {
  GradientSampleSet set;
  for (size_t i : ids) {
    if (i >= data.size()) throw std::out_of_range("example index out of range");
    LossAndGrad lg = model.CrossEntropy(w, data.features.row(i), data.labels[i]);
    if (clip) lg.grad = ClipGradient(lg.grad, *clip, clip_norm);
    set.samples.AppendRow(lg.grad);
  }
  return set;
}

TrainingResult RunTraining(const Model& model, const LabeledDataset& train,
                           const BatchSchedule& schedule,
                           const TrainingConfig& config, ParamVector initial,
                           const IterateObserver& observer) {
  if (initial.size() != model.parameter_count()) {
    throw std::invalid_argument("initial point has wrong dimension");
  }
  if (config.algorithm == Algorithm::kSgld &&
      config.noise.kind() != NoiseKind::kGaussian) {
    throw std::invalid_argument("SGLD uses Gaussian noise");
  }
  if (config.stats_source == SampleSource::kHoldOut) {
    if (config.holdout_pool == nullptr || config.holdout_pool->size() == 0) {
      throw std::invalid_argument("hold-out statistics need a hold-out pool");
    }
    if (config.holdout_size < 2) {
      throw std::invalid_argument("hold-out size must be at least 2");
    }
  }

  TrainingResult result;
  TrajectoryRecord& rec = result.record;
  rec.algorithm = config.algorithm;
  rec.schedule_kind = schedule.kind;
  rec.partition = schedule.partition;
  rec.clip = config.clip;
  rec.clip_norm = config.clip_norm;
  rec.domain = config.domain;
  rec.noise = config.noise;
  rec.output = config.output;
  rec.n = train.size();
  rec.dim = model.parameter_count();

  const DomainSpec step_domain =
      (config.algorithm == Algorithm::kSgld && !config.projected_sgld)
          ? DomainSpec::None()
          : config.domain;

  Rng noise_rng = DeriveRng(config.seed, config.noise_stream);
  ParamVector w = std::move(initial);
  ParamVector sum(w.size(), 0.0);
  ParamVector best = w;
  double best_loss = kInf;

  const size_t T = schedule.iterations();
  for (size_t t = 1; t <= T; ++t) {
    const std::span<const size_t> ids = schedule.BatchAt(t);
    IterationConfig cfg;
    cfg.t = t;
    cfg.eta = config.learning_rate.At(t);
    cfg.b = ids.size();
    cfg.batch_ids.assign(ids.begin(), ids.end());
    if (schedule.kind == ScheduleKind::kWithReplacement) {
      cfg.batch_index = schedule.block_of_iteration[t - 1];
    }
    switch (config.algorithm) {
      case Algorithm::kNoisy:
        cfg.m = config.noise_scale;
        break;
      case Algorithm::kDpSgd:
        cfg.m = cfg.eta;
        break;
      case Algorithm::kSgld:
        cfg.beta = config.beta_scales_with_eta ? config.beta_scale / (2.0 * cfg.eta)
                                               : config.beta_scale;
        cfg.m = std::sqrt(2.0 * cfg.eta / cfg.beta);
        break;
    }

    GradientSampleSet grads =
        PerExampleGradients(model, w, train, ids, config.clip, config.clip_norm);
    grads.iteration = t;

    IterationRecord it;
    if (config.stats_source == SampleSource::kInBatch) {
      if (grads.samples.rows() < 2) {
        throw std::invalid_argument("in-batch statistics need batch size >= 2");
      }
      it.stats = ComputeGradientStats(grads);
      if (config.retain_samples) it.samples = grads;
    } else {
      const LabeledDataset& pool = *config.holdout_pool;
      const size_t k = std::min(config.holdout_size, pool.size());
      std::vector<size_t> order(pool.size());
      std::iota(order.begin(), order.end(), size_t{0});
      Rng rng = DeriveRng(config.seed, streams::kHoldOut, t);
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(k);
      GradientSampleSet held =
          PerExampleGradients(model, w, pool, order, config.clip, config.clip_norm);
      held.iteration = t;
      held.source = SampleSource::kHoldOut;
      it.stats = ComputeGradientStats(held);
      if (config.retain_samples) it.samples = std::move(held);
    }
    if (config.retain_batch_gradients) it.batch_gradient = MeanRow(grads.samples);

    w = NoisyStep(w, grads, cfg, config.noise, step_domain, noise_rng);
    it.config = std::move(cfg);
    rec.iterations.push_back(std::move(it));

    for (size_t i = 0; i < w.size(); ++i) sum[i] += w[i];
    if (config.output == OutputSelector::kArgminLoss) {
      const double loss = MeanCrossEntropy(model, w, train);
      if (loss < best_loss) {
        best_loss = loss;
        best = w;
      }
    }
    if (observer) observer(t, w);
  }

  if (T == 0) {
    result.params = std::move(w);
  } else if (config.output == OutputSelector::kLastIterate) {
    result.params = std::move(w);
  } else if (config.output == OutputSelector::kAverage) {
    for (double& x : sum) x /= static_cast<double>(T);
    result.params = std::move(sum);
  } else {
    result.params = std::move(best);
  }
  return result;
}

ParamVector InitialPoint(const Model& model, const DomainSpec& domain,
                         InitKind kind, uint64_t seed) {
  Rng rng = DeriveRng(seed, streams::kInit);
  const size_t d = model.parameter_count();
  if (kind == InitKind::kFanIn || !domain.bounded()) {
    return Project(model.InitFanIn(rng), domain);
  }
  ParamVector w(d);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (domain.kind) {
    case DomainSpec::Kind::kL2Ball: {
      for (double& x : w) x = normal(rng);
      const double len = L2Norm(w);
      const double r =
          domain.radius * std::pow(unit(rng), 1.0 / static_cast<double>(d));
      for (double& x : w) x *= r / len;
      break;
    }
    case DomainSpec::Kind::kL1Ball: {
      // d + 1 exponentials normalized to sum 1 are uniform on the simplex;
      // dropping the last and attaching random signs fills the cross-polytope.
      std::exponential_distribution<double> expo(1.0);
      std::vector<double> e(d + 1);
      for (double& x : e) x = expo(rng);
      const double total = std::accumulate(e.begin(), e.end(), 0.0);
      for (size_t i = 0; i < d; ++i) {
        w[i] = domain.radius * e[i] / total * (unit(rng) < 0.5 ? -1.0 : 1.0);
      }
      break;
    }
    case DomainSpec::Kind::kBox:
      CheckBox(domain, d);
      for (size_t i = 0; i < d; ++i) {
        const double lo = BoxBound(domain.lo, i), hi = BoxBound(domain.hi, i);
        w[i] = lo + (hi - lo) * unit(rng);
      }
      break;
    case DomainSpec::Kind::kNone:
      break;
  }
  return w;
}

}  // namespace noisybound
