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

#ifndef NOISYBOUND_FED_SIM_H_
#define NOISYBOUND_FED_SIM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisybound/bound_engine.h"
#include "noisybound/dataset.h"
#include "noisybound/model.h"
#include "noisybound/optimizers.h"

namespace noisybound {

// Federated averaging with local projected DP-SGD under Gaussian noise.
struct FedConfig {
  size_t clients = 1;       // N
  size_t per_round = 1;     // C
  size_t rounds = 1;        // T
  size_t local_steps = 1;   // M
  double eta = 0.03;
  size_t batch_size = 2;    // b
  std::optional<double> clip;  // K, L2
  DomainSpec domain;
  uint64_t seed = 0;
};

// Throws std::invalid_argument unless 1 <= C <= N, T, M >= 1, b >= 2, eta >= 0.
void Validate(const FedConfig& config);

struct FedStepRecord {
  size_t round = 0;       // t, 1-based
  size_t client = 0;      // k
  size_t local_step = 0;  // j, 1-based
  // E||g - e||_2 over the b fresh per-example directions at W_{t,j-1}^k.
  double statistic = 0.0;
  size_t q_exponent = 0;  // M (T + 1 - t) - j
};

struct FedTrajectory {
  FedConfig config;
  size_t dim = 0;
  std::vector<size_t> client_sizes;
  // Selected clients S_t of every round, ascending.
  std::vector<std::vector<size_t>> selected;
  // In (round, client, local step) order.
  std::vector<FedStepRecord> steps;
  // W_0, ..., W_T.
  std::vector<ParamVector> global_iterates;

  const ParamVector& final_params() const { return global_iterates.back(); }
  // Rounds in which client k took part.
  std::vector<size_t> RoundsOf(size_t k) const;
};

// Noise stream of client k; shared by every round it takes part in. Client 0
// uses the single-run noise stream, so a one-client run replays RunTraining.
uint64_t ClientNoiseStream(size_t k);

// Runs the algorithm. Client k consumes its examples in index order, b fresh
// ones per local step, and throws std::runtime_error once they run out.
FedTrajectory RunFed(const Model& model, const FedConfig& config,
                     std::span<const LabeledDataset> client_data,
                     ParamVector initial);

// q = 1 - 2 Phi_bar(sqrt(C) (D + 2 eta K) / (2 eta)); 1 when D or K is
// unbounded.
double FedContraction(const FedConfig& config, size_t dim);

// Generalization bound of client k with a loss bounded by A and n_k examples.
// A client that was never selected gets 0.
BoundReport ClientBound(const FedTrajectory& trajectory, size_t k, double A,
                        size_t n_k);

// One line per local step: round,client,local_step,statistic,q_exponent.
std::string FedTrajectoryCsv(const FedTrajectory& trajectory);

}  // namespace noisybound

#endif  // NOISYBOUND_FED_SIM_H_
