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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace noisybound {
namespace {

std::vector<LabeledDataset> Clients(size_t count, size_t n, uint64_t seed,
                                    bool identical = false) {
  std::vector<LabeledDataset> out;
  for (size_t k = 0; k < count; ++k) {
    BlobsSpec spec{.n = n, .dim = 3, .classes = 2, .separation = 3.0,
                   .seed = identical ? seed : seed + k,
                   .shift = identical ? 0.0 : 0.5 * static_cast<double>(k)};
    out.push_back(SynthBlobs(spec));
  }
  return out;
}

FedConfig Config(size_t N, size_t C, size_t T, size_t M) {
  FedConfig c;
  c.clients = N;
  c.per_round = C;
  c.rounds = T;
  c.local_steps = M;
  c.eta = 0.05;
  c.batch_size = 4;
  c.clip = 1.0;
  c.domain = DomainSpec::L2Ball(2.0);
  c.seed = 31;
  return c;
}

TEST(FedConfigTest, Validation) {
  EXPECT_NO_THROW(Validate(Config(4, 2, 4, 5)));
  EXPECT_THROW(Validate(Config(2, 3, 1, 1)), std::invalid_argument);
  EXPECT_THROW(Validate(Config(2, 0, 1, 1)), std::invalid_argument);
  EXPECT_THROW(Validate(Config(2, 1, 0, 1)), std::invalid_argument);
  EXPECT_THROW(Validate(Config(2, 1, 1, 0)), std::invalid_argument);
}

TEST(FedTest, SingleClientReplaysDpSgdRun) {
  const Model model = Model::Logistic(3, 2);
  const std::vector<LabeledDataset> data = Clients(1, 120, 5);
  const FedConfig config = Config(1, 1, 6, 5);
  const ParamVector w0(model.parameter_count(), 0.1);
  const FedTrajectory fed = RunFed(model, config, data, w0);

  TrainingConfig tc;
  tc.algorithm = Algorithm::kDpSgd;
  tc.clip = config.clip;
  tc.domain = config.domain;
  tc.learning_rate = {config.eta, 1.0, 0};
  tc.seed = config.seed;
  std::vector<ParamVector> iterates;
  const IterateObserver observer = [&](size_t, std::span<const double> w) {
    iterates.emplace_back(w.begin(), w.end());
  };
  const TrainingResult single =
      RunTraining(model, data[0], SequentialSchedule(120, 4, 30), tc, w0, observer);

  EXPECT_EQ(fed.final_params(), single.params);
  for (size_t t = 1; t <= config.rounds; ++t) {
    EXPECT_EQ(fed.global_iterates[t], iterates[t * config.local_steps - 1]);
  }
  ASSERT_EQ(fed.steps.size(), single.record.T());
  for (size_t i = 0; i < fed.steps.size(); ++i) {
    EXPECT_EQ(fed.steps[i].statistic, single.record.iterations[i].stats.l2_centered_mean);
  }
}

TEST(FedTest, ParticipationAudit) {
  const Model model = Model::Logistic(3, 2);
  const std::vector<LabeledDataset> data = Clients(4, 200, 7);
  const FedTrajectory fed =
      RunFed(model, Config(4, 2, 4, 5), data, ParamVector(model.parameter_count(), 0.0));
  size_t total = 0;
  for (size_t k = 0; k < 4; ++k) total += fed.RoundsOf(k).size();
  EXPECT_EQ(total, 8u);
  for (const auto& s : fed.selected) {
    EXPECT_EQ(s.size(), 2u);
    EXPECT_LT(s[0], s[1]);
  }
  EXPECT_EQ(fed.steps.size(), 4u * 2u * 5u);
  EXPECT_EQ(fed.global_iterates.size(), 5u);
}

TEST(FedTest, NeverSelectedClientHasZeroBound) {
  const Model model = Model::Logistic(3, 2);
  const std::vector<LabeledDataset> data = Clients(4, 40, 9);
  const FedTrajectory fed =
      RunFed(model, Config(4, 1, 1, 2), data, ParamVector(model.parameter_count(), 0.0));
  size_t zero = 0;
  for (size_t k = 0; k < 4; ++k) {
    const BoundReport r = ClientBound(fed, k, 1.0, 40);
    if (fed.RoundsOf(k).empty()) {
      EXPECT_EQ(r.total, 0.0);
      ++zero;
    } else {
      EXPECT_GT(r.total, 0.0);
    }
  }
  EXPECT_EQ(zero, 3u);
}

TEST(FedTest, ClientBoundMatchesIndependentFormula) {
  const Model model = Model::Logistic(3, 2);
  const std::vector<LabeledDataset> data = Clients(3, 100, 11);
  const FedConfig config = Config(3, 2, 3, 4);
  const FedTrajectory fed =
      RunFed(model, config, data, ParamVector(model.parameter_count(), 0.0));
  const double D = 4.0, K = 1.0;
  const double q =
      1.0 - std::erfc(std::sqrt(2.0) * (D + 2.0 * config.eta * K) / (2.0 * config.eta) /
                      std::sqrt(2.0));
  EXPECT_NEAR(FedContraction(config, fed.dim), q, 1e-15);
  for (size_t k = 0; k < 3; ++k) {
    double expected = 0.0;
    for (const FedStepRecord& s : fed.steps) {
      if (s.client != k) continue;
      EXPECT_EQ(s.q_exponent, config.local_steps * (config.rounds + 1 - s.round) -
                                  s.local_step);
      expected += s.statistic * std::pow(q, static_cast<double>(s.q_exponent)) / 100.0;
    }
    EXPECT_NEAR(ClientBound(fed, k, 1.0, 100).total, expected, 1e-15);
  }
}

TEST(FedTest, PlugInExample) {
  FedTrajectory fed;
  fed.config = Config(1, 1, 1, 1);
  fed.config.domain = DomainSpec::None();
  fed.dim = 2;
  fed.selected = {{0}};
  fed.steps = {FedStepRecord{.round = 1, .client = 0, .local_step = 1,
                             .statistic = 0.5, .q_exponent = 0}};
  EXPECT_NEAR(ClientBound(fed, 0, 1.0, 100).total, 0.005, 1e-15);
}

TEST(FedTest, IdenticalClientsShareFirstLocalStatistic) {
  const Model model = Model::Logistic(3, 2);
  const std::vector<LabeledDataset> data = Clients(3, 60, 13, true);
  const FedTrajectory fed =
      RunFed(model, Config(3, 3, 2, 3), data, ParamVector(model.parameter_count(), 0.2));
  for (size_t t = 1; t <= 2; ++t) {
    std::vector<double> first;
    for (const FedStepRecord& s : fed.steps) {
      if (s.round == t && s.local_step == 1) first.push_back(s.statistic);
    }
    ASSERT_EQ(first.size(), 3u);
    EXPECT_EQ(first[0], first[1]);
    EXPECT_EQ(first[1], first[2]);
  }
}

TEST(FedTest, DeterministicAndExhaustionIsAnError) {
  const Model model = Model::Logistic(3, 2);
  const std::vector<LabeledDataset> data = Clients(2, 40, 15);
  const FedConfig config = Config(2, 2, 2, 5);
  const ParamVector w0(model.parameter_count(), 0.0);
  EXPECT_EQ(FedTrajectoryCsv(RunFed(model, config, data, w0)),
            FedTrajectoryCsv(RunFed(model, config, data, w0)));
  EXPECT_EQ(FedTrajectoryCsv(RunFed(model, config, data, w0)).substr(0, 45),
            "round,client,local_step,statistic,q_exponent\n");
  // 3 rounds x 5 steps x 4 examples = 60 > 40 examples per client.
  EXPECT_THROW(RunFed(model, Config(2, 2, 3, 5), data, w0), std::runtime_error);
}

}  // namespace
}  // namespace noisybound
