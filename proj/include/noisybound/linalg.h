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

#ifndef NOISYBOUND_LINALG_H_
#define NOISYBOUND_LINALG_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace noisybound {

// Flat model parameter vector w.
using ParamVector = std::vector<double>;

enum class Norm { kL1, kL2 };

// Dense row-major matrix. Rows are examples (or per-example gradients).
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  // Appends a row; the first appended row fixes the column count of an
  // empty matrix.
  void AppendRow(std::span<const double> values);

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

double NormOf(std::span<const double> v, Norm norm);
double L1Norm(std::span<const double> v);
double L2Norm(std::span<const double> v);
double SquaredL2Norm(std::span<const double> v);

// ||a - b|| without materializing the difference.
double DistanceOf(std::span<const double> a, std::span<const double> b,
                  Norm norm);

// Per-column mean of the rows.
std::vector<double> ColumnMeans(const Matrix& m);

// Per-column lower median (element (n-1)/2 of the sorted column).
std::vector<double> ColumnLowerMedians(const Matrix& m);

inline void CheckSameSize(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

}  // namespace noisybound

#endif  // NOISYBOUND_LINALG_H_
