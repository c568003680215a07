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

#ifndef NOISYBOUND_EXPERIMENTS_H_
#define NOISYBOUND_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "noisybound/config.h"
#include "noisybound/dataset.h"
#include "noisybound/model.h"
#include "noisybound/optimizers.h"

namespace noisybound {

// One evaluation point of a training run.
struct CheckpointRow {
  size_t epoch = 0;
  size_t iteration = 0;
  double train_loss01 = 0.0;
  double test_loss01 = 0.0;
  double gap = 0.0;
  // In the order of bounds.list.
  std::vector<double> bounds;
  // Mean recorded gradient variance over the iterations since the previous
  // checkpoint (0 for the initial row).
  double grad_var_mean = 0.0;
};

struct SeedRun {
  uint64_t seed = 0;
  std::vector<CheckpointRow> rows;
};

// Train/test data of one seed: synthetic blobs drawn with the seed, or the
// configured CSV files; corruption is applied to the training labels (and to
// the test labels when data.corrupt_test is set).
std::pair<LabeledDataset, LabeledDataset> BuildData(const RunConfig& config,
                                                    uint64_t seed);
Model BuildModel(const RunConfig& config, size_t input_dim, size_t classes);
DomainSpec BuildDomain(const OptimConfig& optim);

// Trains one seed and evaluates the configured bounds at every checkpoint: the
// initial point, then every pass over the partition (SGLD-style schedules) or
// every optim.report_every iterations (single-pass schedules).
SeedRun TrainSeed(const RunConfig& config, uint64_t seed);

// The configured run after the sweep axis is set to `value`.
RunConfig ApplySweepValue(const RunConfig& config, double value);

// CSV bodies (no timestamp line) of the four subcommands.
std::string RunDivergenceCsv(const RunConfig& config);
std::string RunTrainCsv(const RunConfig& config);
std::string RunFedCsv(const RunConfig& config);
std::string RunSweepCsv(const RunConfig& config);
// Dispatches on config.experiment after validation.
std::string RunExperimentCsv(const RunConfig& config);

// Nine significant digits; "inf", "-inf", "nan" for non-finite values.
std::string FormatCsvValue(double v);

// Spearman rank correlation with average ranks for ties; NaN when either
// input is constant or shorter than 2.
double SpearmanRho(std::span<const double> x, std::span<const double> y);

// run.workers if set, else the NOISYBOUND_WORKERS environment variable, else
// the hardware thread count.
size_t ResolveWorkers(const RunConfig& config);

// Calls fn(i) for i in [0, count) on up to `workers` threads. Rethrows the
// exception of the lowest failing index.
void ParallelFor(size_t count, size_t workers,
                 const std::function<void(size_t)>& fn);

}  // namespace noisybound

#endif  // NOISYBOUND_EXPERIMENTS_H_
