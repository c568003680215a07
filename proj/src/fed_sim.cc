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

#include "noisybound/fed_sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace noisybound {

void Validate(const FedConfig& c) {
  if (c.clients == 0 || c.per_round == 0 || c.per_round > c.clients) {
    throw std::invalid_argument("need 1 <= clients per round <= clients");
  }
  if (c.rounds == 0 || c.local_steps == 0) {
    throw std::invalid_argument("rounds and local steps must be positive");
  }
  if (c.batch_size < 2) throw std::invalid_argument("local batch size must be >= 2");
  if (!(c.eta >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (c.clip && !(*c.clip > 0.0)) throw std::invalid_argument("clip must be > 0");
}

std::vector<size_t> FedTrajectory::RoundsOf(size_t k) const {
  std::vector<size_t> rounds;
  for (size_t t = 0; t < selected.size(); ++t) {
    if (std::binary_search(selected[t].begin(), selected[t].end(), k)) {
      rounds.push_back(t + 1);
    }
  }
  return rounds;
}

uint64_t ClientNoiseStream(size_t k) {
  return streams::kNoise + streams::kClientNoiseBase * k;
}

FedTrajectory RunFed(const Model& model, const FedConfig& config,
                     std::span<const LabeledDataset> client_data,
                     ParamVector initial) {
  Validate(config);
  if (client_data.size() != config.clients) {
    throw std::invalid_argument("expected " + std::to_string(config.clients) +
                                " client datasets, got " +
                                std::to_string(client_data.size()));
  }
  if (initial.size() != model.parameter_count()) {
    throw std::invalid_argument("initial point has wrong dimension");
  }
  FedTrajectory traj;
  traj.config = config;
  traj.dim = model.parameter_count();
  for (const LabeledDataset& d : client_data) traj.client_sizes.push_back(d.size());
  traj.global_iterates.push_back(std::move(initial));

  std::vector<Rng> noise;
  for (size_t k = 0; k < config.clients; ++k) {
    noise.push_back(DeriveRng(config.seed, ClientNoiseStream(k)));
  }
  std::vector<size_t> cursor(config.clients, 0);
  const NoiseModel gaussian = NoiseModel::Gaussian();
  const size_t b = config.batch_size, M = config.local_steps, T = config.rounds;

  for (size_t t = 1; t <= T; ++t) {
    std::vector<size_t> order(config.clients);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng select = DeriveRng(config.seed, streams::kClientSelect, t);
    std::shuffle(order.begin(), order.end(), select);
    order.resize(config.per_round);
    std::sort(order.begin(), order.end());
    traj.selected.push_back(order);

    const ParamVector& start = traj.global_iterates.back();
    ParamVector sum(start.size(), 0.0);
    for (size_t k : order) {
      ParamVector w = start;
      for (size_t j = 1; j <= M; ++j) {
        if (cursor[k] + b > client_data[k].size()) {
          throw std::runtime_error("client " + std::to_string(k) +
                                   " ran out of fresh data in round " +
                                   std::to_string(t));
        }
        std::vector<size_t> ids(b);
        std::iota(ids.begin(), ids.end(), cursor[k]);
        cursor[k] += b;
        const GradientSampleSet grads = PerExampleGradients(
            model, w, client_data[k], ids, config.clip, Norm::kL2);
        FedStepRecord rec;
        rec.round = t;
        rec.client = k;
        rec.local_step = j;
        rec.statistic = CenteredNormMean(grads, Norm::kL2, Center::kMean);
        rec.q_exponent = M * (T + 1 - t) - j;
        traj.steps.push_back(rec);
        IterationConfig cfg;
        cfg.t = j;
        cfg.eta = config.eta;
        cfg.m = config.eta;
        cfg.b = b;
        w = NoisyStep(w, grads, cfg, gaussian, config.domain, noise[k]);
      }
      for (size_t i = 0; i < w.size(); ++i) sum[i] += w[i];
    }
    for (double& x : sum) x /= static_cast<double>(config.per_round);
    traj.global_iterates.push_back(std::move(sum));
  }
  return traj;
}

double FedContraction(const FedConfig& config, size_t dim) {
  const double D = config.domain.Diameter(Norm::kL2, dim);
  const double K = config.clip.value_or(std::numeric_limits<double>::infinity());
  if (std::isinf(D) || std::isinf(K) || !(config.eta > 0.0)) return 1.0;
  const double x = std::sqrt(static_cast<double>(config.per_round)) *
                   (D + 2.0 * config.eta * K) / (2.0 * config.eta);
  return 1.0 - 2.0 * GaussianCcdf(x);
}

BoundReport ClientBound(const FedTrajectory& trajectory, size_t k, double A,
                        size_t n_k) {
  if (!(A > 0.0)) throw std::invalid_argument("A must be positive");
  if (n_k == 0) throw std::invalid_argument("n_k must be positive");
  if (k >= trajectory.config.clients) throw std::out_of_range("no such client");
  const double q = FedContraction(trajectory.config, trajectory.dim);
  BoundReport report;
  for (const FedStepRecord& s : trajectory.steps) {
    if (s.client != k) continue;
    const double qp = std::pow(q, static_cast<double>(s.q_exponent));
    report.per_iteration_terms.push_back(A / static_cast<double>(n_k) *
                                         s.statistic * qp);
    report.decay_factors.push_back(qp);
    report.total += report.per_iteration_terms.back();
  }
  return report;
}

std::string FedTrajectoryCsv(const FedTrajectory& trajectory) {
  std::string out = "round,client,local_step,statistic,q_exponent\n";
  char buf[128];
  for (const FedStepRecord& s : trajectory.steps) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.9g,%zu\n", s.round, s.client,
                  s.local_step, s.statistic, s.q_exponent);
    out += buf;
  }
  return out;
}

}  // namespace noisybound
