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

#ifndef NOISYBOUND_OPTIMIZERS_H_
#define NOISYBOUND_OPTIMIZERS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "noisybound/dataset.h"
#include "noisybound/linalg.h"
#include "noisybound/model.h"
#include "noisybound/noise_channels.h"
#include "noisybound/rng.h"
#include "noisybound/stat_estimators.h"

namespace noisybound {

// Compact parameter domain W. kNone means unconstrained (diameter +infinity).
struct DomainSpec {
  enum class Kind { kNone, kL2Ball, kL1Ball, kBox };
  Kind kind = Kind::kNone;
  double radius = 0.0;
  // Box bounds; a single entry applies to every coordinate.
  std::vector<double> lo;
  std::vector<double> hi;

  static DomainSpec None() { return {}; }
  static DomainSpec L2Ball(double radius);
  static DomainSpec L1Ball(double radius);
  static DomainSpec Box(std::vector<double> lo, std::vector<double> hi);

  bool bounded() const { return kind != Kind::kNone; }
  // sup ||w - w'|| over the domain in the given norm.
  double Diameter(Norm norm, size_t dim) const;
  bool Contains(std::span<const double> w, double tol = 1e-12) const;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

// Nearest point of the domain. The L1-ball projection is the Euclidean one
// (soft thresholding), which is also an L1-nearest point.
ParamVector Project(std::span<const double> w, const DomainSpec& domain);

// g if ||g|| <= K, else g * K / ||g||.
std::vector<double> ClipGradient(std::span<const double> g, double K, Norm norm);

struct IterationConfig {
  size_t t = 0;        // 1-based iteration index
  double eta = 0.0;    // learning rate
  double m = 0.0;      // noise magnitude
  size_t b = 0;        // batch size
  std::vector<size_t> batch_ids;
  // SGLD only.
  double beta = 0.0;
  // With-replacement schedules: which partition block S_j was used.
  std::optional<size_t> batch_index;

  friend bool operator==(const IterationConfig&, const IterationConfig&) = default;
};

// Proj_W(w - eta * mean(grads) + m * N), one fresh noise draw from rng.
ParamVector NoisyStep(std::span<const double> w, const GradientSampleSet& grads,
                      const IterationConfig& cfg, const NoiseModel& noise,
                      const DomainSpec& domain, Rng& rng);

// Clips every row of grads to K, then Proj_W(w - eta * (mean + N)). Implemented
// as NoisyStep with m = eta, so it reproduces that step exactly on the same
// generator state (N is symmetric).
ParamVector DpSgdStep(std::span<const double> w, const GradientSampleSet& grads,
                      double eta, const NoiseModel& noise, double K, Norm clip_norm,
                      const DomainSpec& domain, Rng& rng);

// w - eta * mean(grads) + sqrt(2 eta / beta) * N with Gaussian N and no
// projection. beta = +infinity gives a plain SGD step.
ParamVector SgldStep(std::span<const double> w, const GradientSampleSet& grads,
                     double eta, double beta, const NoiseModel& noise, Rng& rng);

enum class ScheduleKind { kWithoutReplacement, kWithReplacement };

struct BatchSchedule {
  ScheduleKind kind = ScheduleKind::kWithoutReplacement;
  // kWithoutReplacement: the batch of every iteration, fixed up front.
  std::vector<std::vector<size_t>> batches;
  // kWithReplacement: disjoint equal-size blocks S_1..S_m and the block used at
  // every iteration.
  std::vector<std::vector<size_t>> partition;
  std::vector<size_t> block_of_iteration;

  size_t iterations() const;
  std::span<const size_t> BatchAt(size_t t) const;  // 1-based
};

// T disjoint batches of size b from a seeded permutation of [0, n). Throws when
// T * b > n.
BatchSchedule WithoutReplacementSchedule(size_t n, size_t b, size_t T,
                                         uint64_t seed);

// T disjoint batches of b consecutive indices, in order. This is how a
// federated client consumes fresh data. Throws when T * b > n.
BatchSchedule SequentialSchedule(size_t n, size_t b, size_t T);

// A fixed partition of [0, n) into n / b blocks, visited once per epoch in a
// fresh seeded order. Requires b to divide n.
BatchSchedule EpochPartitionSchedule(size_t n, size_t b, size_t epochs,
                                     uint64_t seed);

// eta_t = initial * decay_rate^((t - 1) / decay_steps) (continuous decay);
// decay_steps = 0 keeps the rate constant.
struct LearningRate {
  double initial = 0.03;
  double decay_rate = 1.0;
  size_t decay_steps = 0;

  double At(size_t t) const;
  friend bool operator==(const LearningRate&, const LearningRate&) = default;
};

enum class Algorithm { kNoisy, kDpSgd, kSgld };
enum class OutputSelector { kLastIterate, kAverage, kArgminLoss };

std::string_view ToString(Algorithm a);
std::string_view ToString(OutputSelector s);

struct TrainingConfig {
  Algorithm algorithm = Algorithm::kNoisy;
  NoiseModel noise = NoiseModel::Gaussian();
  DomainSpec domain;
  std::optional<double> clip;
  Norm clip_norm = Norm::kL2;
  LearningRate learning_rate;
  // kNoisy: constant noise magnitude m_t.
  double noise_scale = 0.0;
  // kSgld: beta_t = beta_scale / (2 eta_t) when beta_scales_with_eta, else
  // beta_t = beta_scale.
  double beta_scale = 1e6;
  bool beta_scales_with_eta = true;
  // Applies Proj_W after SGLD steps as well.
  bool projected_sgld = false;

  SampleSource stats_source = SampleSource::kInBatch;
  size_t holdout_size = 64;
  const LabeledDataset* holdout_pool = nullptr;

  OutputSelector output = OutputSelector::kLastIterate;
  // Keep every per-example gradient snapshot (needed by the generic bound).
  bool retain_samples = false;
  // Keep the batch-mean gradient of every iteration.
  bool retain_batch_gradients = false;

  uint64_t seed = 0;
  uint64_t noise_stream = streams::kNoise;
};

// Statistics of the per-example directions at W_{t-1}, taken before the update.
struct GradientStats {
  size_t samples = 0;
  double variance = 0.0;             // Var, mean-centered
  double mmae = 0.0;                 // E||g - median||_1
  double l2_centered_mean = 0.0;     // E||g - mean||_2
  double sqrt_l1_centered_mean = 0.0;  // E sqrt(||g - median||_1)
  ExpMoment exp_l2_squared;          // E exp(4 ||g - mean||_2^2) - 1
  ExpMoment exp_l1;                  // E exp(2 ||g - median||_1) - 1

  friend bool operator==(const GradientStats& a, const GradientStats& b);
};

GradientStats ComputeGradientStats(const GradientSampleSet& set);

struct IterationRecord {
  IterationConfig config;
  GradientStats stats;
  std::optional<GradientSampleSet> samples;
  std::vector<double> batch_gradient;

  friend bool operator==(const IterationRecord& a, const IterationRecord& b);
};

struct TrajectoryRecord {
  Algorithm algorithm = Algorithm::kNoisy;
  ScheduleKind schedule_kind = ScheduleKind::kWithoutReplacement;
  std::vector<std::vector<size_t>> partition;
  std::optional<double> clip;
  Norm clip_norm = Norm::kL2;
  DomainSpec domain;
  NoiseModel noise = NoiseModel::Gaussian();
  OutputSelector output = OutputSelector::kLastIterate;
  size_t n = 0;    // training set size
  size_t dim = 0;  // parameter count
  std::vector<IterationRecord> iterations;

  size_t T() const { return iterations.size(); }
  // The record of the same run stopped after T iterations.
  TrajectoryRecord Prefix(size_t T) const;

  friend bool operator==(const TrajectoryRecord& a, const TrajectoryRecord& b);
};

struct TrainingResult {
  ParamVector params;
  TrajectoryRecord record;
};

// Called after every iteration with t and W_t.
using IterateObserver = std::function<void(size_t, std::span<const double>)>;

// Runs the schedule, recording per-iteration statistics, and returns the
// parameter chosen by the output selector (W_0 when the schedule is empty).
TrainingResult RunTraining(const Model& model, const LabeledDataset& train,
                           const BatchSchedule& schedule,
                           const TrainingConfig& config, ParamVector initial,
                           const IterateObserver& observer = {});

enum class InitKind { kFanIn, kDomainUniform };

// W_0: uniform over the domain (kDomainUniform with a bounded domain), else the
// fan-in initializer projected onto the domain.
ParamVector InitialPoint(const Model& model, const DomainSpec& domain,
                         InitKind kind, uint64_t seed);

// Per-example directions (gradients, clipped when clip is set) at w.
GradientSampleSet PerExampleGradients(const Model& model,
                                      std::span<const double> w,
                                      const LabeledDataset& data,
                                      std::span<const size_t> ids,
                                      std::optional<double> clip, Norm clip_norm);

}  // namespace noisybound

#endif  // NOISYBOUND_OPTIMIZERS_H_
