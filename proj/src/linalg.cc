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

#include "noisybound/linalg.h"

#include <algorithm>
#include <cmath>

namespace noisybound {

void Matrix::AppendRow(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw std::invalid_argument("row has " + std::to_string(values.size()) +
                                " columns, expected " + std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double L1Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double SquaredL2Norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double L2Norm(std::span<const double> v) { return std::sqrt(SquaredL2Norm(v)); }

double NormOf(std::span<const double> v, Norm norm) {
  return norm == Norm::kL1 ? L1Norm(v) : L2Norm(v);
}

double DistanceOf(std::span<const double> a, std::span<const double> b,
                  Norm norm) {
  CheckSameSize(a, b);
  double s = 0.0;
  if (norm == Norm::kL1) {
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> ColumnMeans(const Matrix& m) {
  std::vector<double> mean(m.cols(), 0.0);
  for (size_t r = 0; r < m.rows(); ++r) {
    for (size_t c = 0; c < m.cols(); ++c) mean[c] += m(r, c);
  }
  for (double& x : mean) x /= static_cast<double>(m.rows());
  return mean;
}

std::vector<double> ColumnLowerMedians(const Matrix& m) {
  std::vector<double> med(m.cols(), 0.0);
  if (m.rows() == 0) return med;
  std::vector<double> column(m.rows());
  const size_t k = (m.rows() - 1) / 2;
  for (size_t c = 0; c < m.cols(); ++c) {
    for (size_t r = 0; r < m.rows(); ++r) column[r] = m(r, c);
    std::nth_element(column.begin(), column.begin() + k, column.end());
    med[c] = column[k];
  }
  return med;
}

}  // namespace noisybound
