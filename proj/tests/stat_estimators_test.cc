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

#include "noisybound/stat_estimators.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace noisybound {
namespace {

GradientSampleSet Rows(const std::vector<std::vector<double>>& rows) {
  GradientSampleSet set;
  for (const auto& r : rows) set.samples.AppendRow(r);
  return set;
}

// Smallest E||g - a||_p^p over a dense grid of candidate a (1-D or 2-D). The
// grid also holds every sample coordinate, where the L1 objective has kinks.
double GridMinimum(const GradientSampleSet& set, bool squared) {
  const size_t dim = set.samples.cols();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : set.samples.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const int steps = dim == 1 ? 20000 : 600;
  std::vector<std::vector<double>> grid(dim);
  for (size_t c = 0; c < dim; ++c) {
    for (int i = 0; i <= steps; ++i) grid[c].push_back(lo + (hi - lo) * i / steps);
    for (size_t i = 0; i < set.samples.rows(); ++i) grid[c].push_back(set.samples(i, c));
  }
  auto objective = [&](std::span<const double> a) {
    double s = 0.0;
    for (size_t i = 0; i < set.samples.rows(); ++i) {
      for (size_t c = 0; c < dim; ++c) {
        const double d = set.samples(i, c) - a[c];
        s += squared ? d * d : std::abs(d);
      }
    }
    return s / static_cast<double>(set.samples.rows());
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> a(dim);
  for (double x : grid[0]) {
    a[0] = x;
    if (dim == 1) {
      best = std::min(best, objective(a));
      continue;
    }
    for (double y : grid[1]) {
      a[1] = y;
      best = std::min(best, objective(a));
    }
  }
  return best;
}

TEST(VarianceTest, Examples) {
  EXPECT_DOUBLE_EQ(Variance(Rows({{0, 0}, {2, 0}})), 1.0);
  EXPECT_DOUBLE_EQ(Variance(Rows({{3, 1}, {3, 1}, {3, 1}})), 0.0);
  EXPECT_NEAR(Variance(Rows({{1}, {2}, {3}})), 2.0 / 3.0, 1e-15);
}

TEST(VarianceTest, RequiresTwoRows) {
  EXPECT_THROW(Variance(Rows({{1, 2}})), std::invalid_argument);
  EXPECT_THROW(Mmae(Rows({{1, 2}})), std::invalid_argument);
  EXPECT_THROW(CenteredNormMean(Rows({{1}}), Norm::kL2, Center::kMean),
               std::invalid_argument);
}

TEST(MmaeTest, Examples) {
  EXPECT_DOUBLE_EQ(Mmae(Rows({{-1}, {0}, {5}})), 2.0);
  EXPECT_DOUBLE_EQ(Mmae(Rows({{4, 4}, {4, 4}})), 0.0);
  EXPECT_DOUBLE_EQ(Mmae(Rows({{0, 0}, {2, 2}})), 2.0);
}

TEST(CenteredNormMeanTest, Examples) {
  EXPECT_DOUBLE_EQ(CenteredNormMean(Rows({{0, 0}, {2, 0}}), Norm::kL2, Center::kMean),
                   1.0);
  EXPECT_DOUBLE_EQ(CenteredNormMean(Rows({{1, 1}, {1, 1}}), Norm::kL1, Center::kMean),
                   0.0);
  EXPECT_DOUBLE_EQ(CenteredNormMean(Rows({{3}, {-3}}), Norm::kL1, Center::kMedian), 3.0);
  EXPECT_DOUBLE_EQ(
      CenteredSqrtNormMean(Rows({{3}, {-3}}), Norm::kL1, Center::kMedian),
      std::sqrt(6.0) / 2.0);
}

TEST(ExpMomentTest, Examples) {
  EXPECT_DOUBLE_EQ(
      ExpMomentOf(Rows({{1, 2}, {1, 2}}), Norm::kL2, 4.0, true, Center::kMean).value,
      0.0);
  EXPECT_NEAR(ExpMomentOf(Rows({{0}, {1}}), Norm::kL2, 4.0, true, Center::kMean).value,
              std::exp(1.0) - 1.0, 1e-12);
  EXPECT_NEAR(ExpMomentOf(Rows({{0}, {1}}), Norm::kL2, 1e-12, true, Center::kMean).value,
              0.0, 1e-11);
  EXPECT_NEAR(ExpMomentOf(Rows({{0}, {2}}), Norm::kL1, 2.0, false, Center::kMedian).value,
              (1.0 + std::exp(4.0)) / 2.0 - 1.0, 1e-12);
}

TEST(ExpMomentTest, OverflowIsFlagged) {
  const ExpMoment e =
      ExpMomentOf(Rows({{0}, {100}}), Norm::kL2, 4.0, true, Center::kMean);
  EXPECT_TRUE(e.overflow);
  EXPECT_EQ(e.value, std::numeric_limits<double>::infinity());
}

TEST(LossAssumptionTest, ImpliedSubGaussian) {
  EXPECT_DOUBLE_EQ(ImpliedSubGaussian(Bounded{1.0}), 0.5);
  EXPECT_DOUBLE_EQ(ImpliedSubGaussian(SubGaussian{0.3}), 0.3);
  EXPECT_DOUBLE_EQ(ImpliedSubGaussian(Bounded{2.0}), 1.0);
  EXPECT_THROW(ImpliedSubGaussian(FiniteVariance{0.1}), std::invalid_argument);
}

TEST(LossAssumptionTest, Validation) {
  EXPECT_THROW(Validate(SubGaussian{0.0}), std::invalid_argument);
  EXPECT_THROW(Validate(Bounded{-1.0}), std::invalid_argument);
  EXPECT_THROW(Validate(FiniteVariance{-0.1}), std::invalid_argument);
  EXPECT_NO_THROW(Validate(FiniteVariance{0.0}));
}

TEST(LossVarianceTest, Examples) {
  EXPECT_DOUBLE_EQ(LossVariance(std::vector<double>{0.3, 0.3, 0.3}), 0.0);
  EXPECT_DOUBLE_EQ(LossVariance(std::vector<double>{0.0, 1.0}), 0.25);
  EXPECT_THROW(LossVariance(std::vector<double>{1.0}), std::invalid_argument);
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.37);
  std::vector<double> losses(101);
  for (double& l : losses) l = coin(rng) ? 1.0 : 0.0;
  EXPECT_LE(LossVariance(losses), 0.25);
}

TEST(EstimatorPropertyTest, MinimizersMatchGridSearch) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 1.5);
  for (size_t dim : {1u, 2u}) {
    for (int trial = 0; trial < 5; ++trial) {
      GradientSampleSet set;
      const size_t rows = 3 + trial;
      for (size_t i = 0; i < rows; ++i) {
        std::vector<double> r(dim);
        for (double& x : r) x = normal(rng);
        set.samples.AppendRow(r);
      }
      EXPECT_NEAR(Variance(set), GridMinimum(set, true), 1e-4 * dim);
      EXPECT_NEAR(Mmae(set), GridMinimum(set, false), 1e-6);
      EXPECT_LE(Variance(set), GridMinimum(set, true) + 1e-12);
      EXPECT_LE(Mmae(set), GridMinimum(set, false) + 1e-12);
    }
  }
}

TEST(EstimatorPropertyTest, ShiftScaleAndPermutation) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> normal(0.0, 1.0);
  GradientSampleSet set;
  for (int i = 0; i < 9; ++i) set.samples.AppendRow(std::vector<double>{
      normal(rng), normal(rng), normal(rng)});
  const double var = Variance(set);
  const double mmae = Mmae(set);
  const double l2 = CenteredNormMean(set, Norm::kL2, Center::kMean);

  GradientSampleSet shifted = set, scaled = set, permuted;
  for (size_t i = 0; i < set.samples.rows(); ++i) {
    for (size_t c = 0; c < 3; ++c) {
      shifted.samples(i, c) += 4.0 - static_cast<double>(c);
      scaled.samples(i, c) *= -2.5;
    }
  }
  for (size_t i = set.samples.rows(); i-- > 0;) permuted.samples.AppendRow(set.samples.row(i));

  EXPECT_NEAR(Variance(shifted), var, 1e-12);
  EXPECT_NEAR(Variance(scaled), 6.25 * var, 1e-12);
  EXPECT_NEAR(Variance(permuted), var, 1e-12);
  EXPECT_NEAR(Mmae(permuted), mmae, 1e-12);
  EXPECT_NEAR(Mmae(shifted), mmae, 1e-12);
  EXPECT_NEAR(CenteredNormMean(permuted, Norm::kL2, Center::kMean), l2, 1e-12);
  EXPECT_NEAR(ExpMomentOf(permuted, Norm::kL1, 0.5, false, Center::kMedian).value,
              ExpMomentOf(set, Norm::kL1, 0.5, false, Center::kMedian).value, 1e-12);
}

TEST(EstimatorPropertyTest, JensenOrderingOfMoments) {
  // E||g - e|| <= sqrt(Var) and E exp(4||g - e||^2) - 1 >= 4 Var.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    GradientSampleSet set;
    for (int i = 0; i < 10; ++i) set.samples.AppendRow(std::vector<double>{
        normal(rng), normal(rng)});
    const double var = Variance(set);
    EXPECT_LE(CenteredNormMean(set, Norm::kL2, Center::kMean), std::sqrt(var) + 1e-12);
    EXPECT_GE(ExpMomentOf(set, Norm::kL2, 4.0, true, Center::kMean).value,
              4.0 * var - 1e-12);
  }
}

}  // namespace
}  // namespace noisybound
