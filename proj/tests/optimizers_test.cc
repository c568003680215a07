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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "noisybound/dataset.h"
#include "noisybound/model.h"

namespace noisybound {
namespace {

GradientSampleSet Rows(const std::vector<std::vector<double>>& rows) {
  GradientSampleSet set;
  for (const auto& r : rows) set.samples.AppendRow(r);
  return set;
}

IterationConfig Step(double eta, double m, size_t b) {
  IterationConfig cfg;
  cfg.t = 1;
  cfg.eta = eta;
  cfg.m = m;
  cfg.b = b;
  return cfg;
}

TEST(ProjectTest, Examples) {
  const DomainSpec ball = DomainSpec::L2Ball(1.0);
  const std::vector<double> inside = {0.2, -0.3};
  EXPECT_EQ(Project(inside, ball), inside);
  const ParamVector p = Project(std::vector<double>{3.0, 4.0}, ball);
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  EXPECT_EQ(Project(std::vector<double>{-2.0, 0.5}, DomainSpec::Box({0.0}, {1.0})),
            (ParamVector{0.0, 0.5}));
  EXPECT_EQ(Project(std::vector<double>{9.0, -9.0}, DomainSpec::None()),
            (ParamVector{9.0, -9.0}));
}

TEST(ProjectTest, L1BallMatchesBruteForceInTwoDimensions) {
  // Euclidean projection onto {|x| + |y| <= 1}: search the boundary densely.
  const DomainSpec l1 = DomainSpec::L1Ball(1.0);
  for (const std::vector<double>& w :
       {std::vector<double>{2.0, 0.5}, std::vector<double>{-0.3, 3.0},
        std::vector<double>{1.5, -1.2}}) {
    double best = std::numeric_limits<double>::infinity();
    ParamVector arg;
    for (int i = 0; i < 400000; ++i) {
      const double s = 4.0 * i / 400000.0;
      const double x = s < 1 ? 1 - s : s < 2 ? 1 - s : s < 3 ? s - 3 : s - 3;
      const double y = s < 1 ? s : s < 2 ? 2 - s : s < 3 ? 2 - s : s - 4;
      const double d = std::hypot(w[0] - x, w[1] - y);
      if (d < best) {
        best = d;
        arg = {x, y};
      }
    }
    const ParamVector p = Project(w, l1);
    EXPECT_NEAR(p[0], arg[0], 1e-4);
    EXPECT_NEAR(p[1], arg[1], 1e-4);
  }
}

TEST(ProjectTest, IdempotentAndInside) {
  Rng rng = DeriveRng(1, streams::kInit);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (const DomainSpec& d :
       {DomainSpec::L2Ball(1.5), DomainSpec::L1Ball(0.7),
        DomainSpec::Box({-1.0, 0.0, 2.0}, {1.0, 0.5, 3.0})}) {
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> w = {normal(rng), normal(rng), normal(rng)};
      const ParamVector p = Project(w, d);
      EXPECT_TRUE(d.Contains(p));
      const ParamVector pp = Project(p, d);
      for (size_t c = 0; c < 3; ++c) EXPECT_NEAR(pp[c], p[c], 1e-12);
    }
  }
}

TEST(DomainTest, Diameters) {
  EXPECT_DOUBLE_EQ(DomainSpec::L2Ball(1.5).Diameter(Norm::kL2, 4), 3.0);
  EXPECT_DOUBLE_EQ(DomainSpec::L1Ball(1.5).Diameter(Norm::kL1, 4), 3.0);
  EXPECT_DOUBLE_EQ(DomainSpec::Box({0.0}, {1.0}).Diameter(Norm::kL2, 4), 2.0);
  EXPECT_DOUBLE_EQ(DomainSpec::Box({0.0}, {1.0}).Diameter(Norm::kL1, 4), 4.0);
  EXPECT_EQ(DomainSpec::None().Diameter(Norm::kL2, 4),
            std::numeric_limits<double>::infinity());
  EXPECT_THROW(DomainSpec::Box({1.0}, {0.0}), std::invalid_argument);
  EXPECT_THROW(DomainSpec::L2Ball(-1.0), std::invalid_argument);
}

TEST(ClipTest, Examples) {
  const std::vector<double> small = {0.1, 0.2};
  EXPECT_EQ(ClipGradient(small, 1.0, Norm::kL2), small);
  const std::vector<double> clipped = ClipGradient(std::vector<double>{3, 4}, 1.0, Norm::kL2);
  EXPECT_NEAR(clipped[0], 0.6, 1e-15);
  EXPECT_NEAR(clipped[1], 0.8, 1e-15);
  EXPECT_EQ(ClipGradient(std::vector<double>{0, 0}, 1.0, Norm::kL2),
            (std::vector<double>{0, 0}));
  EXPECT_NEAR(L1Norm(ClipGradient(std::vector<double>{3, -4}, 2.0, Norm::kL1)), 2.0,
              1e-15);
}

TEST(NoisyStepTest, Examples) {
  Rng rng = DeriveRng(2, streams::kNoise);
  const std::vector<double> w = {3.0, 4.0};
  EXPECT_EQ(NoisyStep(w, Rows({{1, 1}, {2, 2}}), Step(0.0, 0.0, 2),
                      NoiseModel::Gaussian(), DomainSpec::L2Ball(1.0), rng),
            Project(w, DomainSpec::L2Ball(1.0)));
  EXPECT_EQ(NoisyStep(std::vector<double>{1.0}, Rows({{0.5}, {1.5}}), Step(0.5, 0.0, 2),
                      NoiseModel::Gaussian(), DomainSpec::None(), rng),
            ParamVector{0.5});
  Rng a = DeriveRng(9, streams::kNoise);
  Rng b = DeriveRng(9, streams::kNoise);
  EXPECT_EQ(NoisyStep(w, Rows({{1, 0}, {0, 1}}), Step(0.1, 0.3, 2),
                      NoiseModel::Gaussian(), DomainSpec::None(), a),
            NoisyStep(w, Rows({{1, 0}, {0, 1}}), Step(0.1, 0.3, 2),
                      NoiseModel::Gaussian(), DomainSpec::None(), b));
  EXPECT_THROW(NoisyStep(w, Rows({{1}, {2}}), Step(0.1, 0.0, 2), NoiseModel::Gaussian(),
                         DomainSpec::None(), rng),
               std::invalid_argument);
}

TEST(DpSgdStepTest, MatchesNoisyStepWithEtaNoise) {
  const std::vector<double> w = {0.3, -0.2, 0.1};
  const GradientSampleSet raw = Rows({{3, 0, 4}, {0.1, 0.1, 0.1}, {-6, 8, 0}});
  GradientSampleSet clipped;
  for (size_t i = 0; i < raw.samples.rows(); ++i) {
    const std::vector<double> c = ClipGradient(raw.samples.row(i), 1.0, Norm::kL2);
    EXPECT_LE(L2Norm(c), 1.0 + 1e-15);
    clipped.samples.AppendRow(c);
  }
  const DomainSpec domain = DomainSpec::L2Ball(0.5);
  Rng a = DeriveRng(4, streams::kNoise);
  Rng b = DeriveRng(4, streams::kNoise);
  const ParamVector dp =
      DpSgdStep(w, raw, 0.05, NoiseModel::Gaussian(), 1.0, Norm::kL2, domain, a);
  const ParamVector noisy =
      NoisyStep(w, clipped, Step(0.05, 0.05, 3), NoiseModel::Gaussian(), domain, b);
  EXPECT_EQ(dp, noisy);
  Rng c = DeriveRng(4, streams::kNoise);
  EXPECT_EQ(DpSgdStep(w, raw, 0.0, NoiseModel::Gaussian(), 1.0, Norm::kL2, domain, c),
            Project(w, domain));
}

TEST(SgldStepTest, Formula) {
  Rng a = DeriveRng(6, streams::kNoise);
  Rng b = DeriveRng(6, streams::kNoise);
  const double beta = 50.0;
  const ParamVector out =
      SgldStep(std::vector<double>{0.0}, Rows({{2.0}, {2.0}}), 0.1, beta,
               NoiseModel::Gaussian(), a);
  const double nu = SampleNoise(NoiseModel::Gaussian(), 1, b)[0];
  EXPECT_NEAR(out[0], -0.2 + std::sqrt(0.2 / beta) * nu, 1e-15);

  Rng c = DeriveRng(6, streams::kNoise);
  const ParamVector sgd =
      SgldStep(std::vector<double>{1.0}, Rows({{2.0}, {4.0}}), 0.1,
               std::numeric_limits<double>::infinity(), NoiseModel::Gaussian(), c);
  EXPECT_DOUBLE_EQ(sgd[0], 0.7);
  EXPECT_THROW(SgldStep(std::vector<double>{0.0}, Rows({{1.0}, {1.0}}), 0.1, beta,
                        NoiseModel::Laplace(), c),
               std::invalid_argument);
}

TEST(ScheduleTest, WithoutReplacementIsDisjoint) {
  const BatchSchedule s = WithoutReplacementSchedule(100, 7, 14, 3);
  ASSERT_EQ(s.iterations(), 14u);
  std::set<size_t> seen;
  for (size_t t = 1; t <= s.iterations(); ++t) {
    EXPECT_EQ(s.BatchAt(t).size(), 7u);
    for (size_t i : s.BatchAt(t)) EXPECT_TRUE(seen.insert(i).second);
  }
  EXPECT_THROW(WithoutReplacementSchedule(10, 5, 3, 1), std::invalid_argument);
}

TEST(ScheduleTest, PartitionIsFixedAndVisitedEachEpoch) {
  const BatchSchedule s = EpochPartitionSchedule(60, 10, 3, 8);
  EXPECT_EQ(s.kind, ScheduleKind::kWithReplacement);
  ASSERT_EQ(s.partition.size(), 6u);
  std::set<size_t> all;
  for (const auto& block : s.partition) {
    EXPECT_EQ(block.size(), 10u);
    all.insert(block.begin(), block.end());
  }
  EXPECT_EQ(all.size(), 60u);
  ASSERT_EQ(s.iterations(), 18u);
  for (size_t e = 0; e < 3; ++e) {
    std::set<size_t> blocks(s.block_of_iteration.begin() + 6 * e,
                            s.block_of_iteration.begin() + 6 * (e + 1));
    EXPECT_EQ(blocks.size(), 6u);
  }
  EXPECT_THROW(EpochPartitionSchedule(61, 10, 1, 8), std::invalid_argument);
}

TEST(LearningRateTest, ContinuousDecay) {
  const LearningRate lr{0.03, 0.96, 2000};
  EXPECT_DOUBLE_EQ(lr.At(1), 0.03);
  EXPECT_NEAR(lr.At(2001), 0.03 * 0.96, 1e-15);
  EXPECT_NEAR(lr.At(1001), 0.03 * std::sqrt(0.96), 1e-15);
  EXPECT_DOUBLE_EQ((LearningRate{0.1, 0.5, 0}).At(500), 0.1);
}

class TrainingTest : public ::testing::Test {
 protected:
  TrainingTest()
      : data_(SynthBlobs(40, 3, 2, 3.0, 12)), model_(Model::Logistic(3, 2)) {
    Rng rng = DeriveRng(12, streams::kInit);
    w0_ = model_.InitFanIn(rng);
  }
  LabeledDataset data_;
  Model model_;
  ParamVector w0_;
};

TEST_F(TrainingTest, NoiselessRunMatchesPlainGradientDescent) {
  const BatchSchedule schedule = WithoutReplacementSchedule(40, 5, 8, 2);
  TrainingConfig config;
  config.learning_rate = {0.2, 1.0, 0};
  const TrainingResult result = RunTraining(model_, data_, schedule, config, w0_);

  ParamVector w = w0_;
  for (size_t t = 1; t <= schedule.iterations(); ++t) {
    std::vector<double> mean(w.size(), 0.0);
    for (size_t i : schedule.BatchAt(t)) {
      const LossAndGrad lg = model_.CrossEntropy(w, data_.features.row(i), data_.labels[i]);
      for (size_t c = 0; c < w.size(); ++c) mean[c] += lg.grad[c] / 5.0;
    }
    for (size_t c = 0; c < w.size(); ++c) w[c] -= 0.2 * mean[c];
  }
  ASSERT_EQ(result.params.size(), w.size());
  for (size_t c = 0; c < w.size(); ++c) EXPECT_NEAR(result.params[c], w[c], 1e-12);
}

TEST_F(TrainingTest, EmptyScheduleReturnsInitialPoint) {
  const TrainingResult result = RunTraining(
      model_, data_, WithoutReplacementSchedule(40, 5, 0, 2), TrainingConfig{}, w0_);
  EXPECT_EQ(result.params, w0_);
  EXPECT_EQ(result.record.T(), 0u);
}

TEST_F(TrainingTest, DeterministicAndRecordsBeforeUpdate) {
  const BatchSchedule schedule = WithoutReplacementSchedule(40, 4, 10, 5);
  TrainingConfig config;
  config.algorithm = Algorithm::kDpSgd;
  config.clip = 0.5;
  config.domain = DomainSpec::L2Ball(2.0);
  config.seed = 77;
  const TrainingResult a = RunTraining(model_, data_, schedule, config, w0_);
  const TrainingResult b = RunTraining(model_, data_, schedule, config, w0_);
  EXPECT_EQ(a.record, b.record);
  EXPECT_EQ(a.params, b.params);

  // The first snapshot is taken at W_0 on the first batch.
  const GradientSampleSet first = PerExampleGradients(
      model_, w0_, data_, schedule.BatchAt(1), config.clip, Norm::kL2);
  EXPECT_DOUBLE_EQ(a.record.iterations[0].stats.variance, Variance(first));
  std::set<size_t> seen;
  for (const IterationRecord& it : a.record.iterations) {
    EXPECT_DOUBLE_EQ(it.config.m, it.config.eta);
    for (size_t i : it.config.batch_ids) EXPECT_TRUE(seen.insert(i).second);
  }
}

TEST_F(TrainingTest, IteratesStayInDomainAndStepsAreBounded) {
  const BatchSchedule schedule = WithoutReplacementSchedule(40, 4, 10, 5);
  TrainingConfig config;
  config.algorithm = Algorithm::kNoisy;
  config.noise_scale = 0.01;
  config.clip = 0.5;
  config.domain = DomainSpec::L2Ball(0.3);
  config.learning_rate = {0.5, 1.0, 0};
  ParamVector previous = Project(w0_, config.domain);
  std::vector<double> pre_projection_steps;
  const IterateObserver observer = [&](size_t, std::span<const double> w) {
    EXPECT_LE(L2Norm(w), 0.3 + 1e-12);
    EXPECT_LE(DistanceOf(w, previous, Norm::kL2),
              config.domain.Diameter(Norm::kL2, w.size()));
    previous.assign(w.begin(), w.end());
  };
  RunTraining(model_, data_, schedule, config, previous, observer);
}

TEST_F(TrainingTest, OutputSelectors) {
  const BatchSchedule schedule = WithoutReplacementSchedule(40, 4, 6, 5);
  TrainingConfig config;
  config.noise_scale = 0.05;
  std::vector<ParamVector> iterates;
  const IterateObserver observer = [&](size_t, std::span<const double> w) {
    iterates.emplace_back(w.begin(), w.end());
  };
  config.output = OutputSelector::kAverage;
  const TrainingResult avg = RunTraining(model_, data_, schedule, config, w0_, observer);
  ParamVector expected(w0_.size(), 0.0);
  for (const auto& w : iterates) {
    for (size_t c = 0; c < w.size(); ++c) expected[c] += w[c] / 6.0;
  }
  for (size_t c = 0; c < w0_.size(); ++c) EXPECT_NEAR(avg.params[c], expected[c], 1e-12);

  config.output = OutputSelector::kArgminLoss;
  const TrainingResult best = RunTraining(model_, data_, schedule, config, w0_);
  double best_loss = std::numeric_limits<double>::infinity();
  ParamVector arg;
  for (const auto& w : iterates) {
    const double loss = MeanCrossEntropy(model_, w, data_);
    if (loss < best_loss) {
      best_loss = loss;
      arg = w;
    }
  }
  EXPECT_EQ(best.params, arg);
}

TEST_F(TrainingTest, HoldOutStatisticsUsePool) {
  const LabeledDataset pool = SynthBlobs(100, 3, 2, 3.0, 99);
  TrainingConfig config;
  config.stats_source = SampleSource::kHoldOut;
  config.holdout_size = 16;
  config.holdout_pool = &pool;
  config.retain_samples = true;
  const TrainingResult r = RunTraining(
      model_, data_, WithoutReplacementSchedule(40, 4, 3, 5), config, w0_);
  for (const IterationRecord& it : r.record.iterations) {
    EXPECT_EQ(it.stats.samples, 16u);
    ASSERT_TRUE(it.samples.has_value());
    EXPECT_EQ(it.samples->source, SampleSource::kHoldOut);
  }
}

TEST_F(TrainingTest, SgldRecordsBetaAndNoiseMagnitude) {
  TrainingConfig config;
  config.algorithm = Algorithm::kSgld;
  config.learning_rate = {0.03, 0.96, 2000};
  const TrainingResult r =
      RunTraining(model_, data_, EpochPartitionSchedule(40, 8, 2, 5), config, w0_);
  ASSERT_EQ(r.record.T(), 10u);
  for (const IterationRecord& it : r.record.iterations) {
    EXPECT_NEAR(it.config.beta, 1e6 / (2.0 * it.config.eta), 1e-6);
    EXPECT_NEAR(it.config.m, std::sqrt(2.0 * it.config.eta / it.config.beta), 1e-15);
    ASSERT_TRUE(it.config.batch_index.has_value());
  }
}

TEST(InitialPointTest, UniformInsideBoundedDomains) {
  const Model model = Model::Mlp(4, {5}, 3);
  for (const DomainSpec& d : {DomainSpec::L2Ball(0.5), DomainSpec::L1Ball(2.0),
                              DomainSpec::Box({-0.1}, {0.2})}) {
    for (uint64_t seed = 0; seed < 5; ++seed) {
      const ParamVector w = InitialPoint(model, d, InitKind::kDomainUniform, seed);
      EXPECT_EQ(w.size(), model.parameter_count());
      EXPECT_TRUE(d.Contains(w));
      EXPECT_EQ(w, InitialPoint(model, d, InitKind::kDomainUniform, seed));
    }
  }
}

}  // namespace
}  // namespace noisybound
