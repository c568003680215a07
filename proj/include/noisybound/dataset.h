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

#ifndef NOISYBOUND_DATASET_H_
#define NOISYBOUND_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noisybound/linalg.h"
#include "noisybound/model.h"

namespace noisybound {

struct LabeledDataset {
  Matrix features;
  std::vector<size_t> labels;
  size_t classes = 0;
  // "synthetic:<seed>" or "csv:<path>".
  std::string provenance;
  double corruption_alpha = 0.0;
  std::vector<size_t> corrupted_indices;
  // Index of each example in the dataset it was drawn from; used to audit
  // train/test disjointness.
  std::vector<size_t> source_ids;

  size_t size() const { return labels.size(); }
  size_t dim() const { return features.cols(); }

  // Subset in the given order, keeping provenance and source ids.
  LabeledDataset Select(std::span<const size_t> indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

struct BlobsSpec {
  size_t n = 0;
  size_t dim = 2;
  size_t classes = 2;
  double separation = 4.0;
  uint64_t seed = 0;
  // Added to every point; gives per-client distributions in federated runs.
  double shift = 0.0;
};

// Isotropic unit-variance Gaussian clusters with class-balanced labels. Class
// centers sit at pairwise distance `separation` (orthogonal axes when
// classes <= dim, otherwise seeded random directions).
LabeledDataset SynthBlobs(const BlobsSpec& spec);
LabeledDataset SynthBlobs(size_t n, size_t dim, size_t classes,
                          double separation, uint64_t seed);

// First `n_first` examples and the rest.
std::pair<LabeledDataset, LabeledDataset> SplitAt(const LabeledDataset& data,
                                                  size_t n_first);

// Moves exactly floor(alpha * n) uniformly chosen labels to a uniformly chosen
// different class.
LabeledDataset CorruptLabels(const LabeledDataset& data, double alpha,
                             uint64_t seed);

// Misclassification rate.
double ZeroOneLoss(const Model& model, std::span<const double> params,
                   const LabeledDataset& data);

// Mean cross-entropy.
double MeanCrossEntropy(const Model& model, std::span<const double> params,
                        const LabeledDataset& data);

enum class EvalLoss { kZeroOne, kCrossEntropy };

struct GapRow {
  double train_loss = 0.0;
  double test_loss = 0.0;
  double gap = 0.0;
};

// test_loss - train_loss. Throws std::invalid_argument when the sets share a
// source id and come from the same provenance.
GapRow MeasureGap(const Model& model, std::span<const double> params,
                  const LabeledDataset& train, const LabeledDataset& test,
                  EvalLoss loss = EvalLoss::kZeroOne);

// Comma-separated numeric features with a trailing integer label column.
// A first line containing any non-numeric field is treated as a header.
LabeledDataset LoadCsv(const std::string& path);
LabeledDataset ParseCsv(const std::string& text, const std::string& origin);
void SaveCsv(const LabeledDataset& data, const std::string& path);
std::string FormatCsv(const LabeledDataset& data);

}  // namespace noisybound

#endif  // NOISYBOUND_DATASET_H_
