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

#include "noisybound/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "noisybound/rng.h"

namespace noisybound {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    fields.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool ParseDouble(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseLabel(std::string_view s, size_t& out) {
  if (s.empty()) return false;
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) return false;
  out = static_cast<size_t>(v);
  return true;
}

}  // namespace

LabeledDataset LabeledDataset::Select(std::span<const size_t> indices) const {
  LabeledDataset out;
  out.classes = classes;
  out.provenance = provenance;
  out.corruption_alpha = corruption_alpha;
  const std::set<size_t> corrupted(corrupted_indices.begin(),
                                   corrupted_indices.end());
  for (size_t k = 0; k < indices.size(); ++k) {
    const size_t i = indices[k];
    if (i >= size()) throw std::out_of_range("dataset index out of range");
    out.features.AppendRow(features.row(i));
    out.labels.push_back(labels[i]);
    out.source_ids.push_back(source_ids.empty() ? i : source_ids[i]);
    if (corrupted.contains(i)) out.corrupted_indices.push_back(k);
  }
  if (out.features.cols() == 0) out.features = Matrix(0, features.cols());
  return out;
}

LabeledDataset SynthBlobs(const BlobsSpec& spec) {
  if (spec.classes < 2) throw std::invalid_argument("need at least 2 classes");
  if (spec.dim == 0) throw std::invalid_argument("dimension must be positive");
  if (spec.n < spec.classes) {
    throw std::invalid_argument("need n >= classes for balanced labels");
  }
  if (!(spec.separation >= 0.0)) {
    throw std::invalid_argument("separation must be nonnegative");
  }
  Rng rng = DeriveRng(spec.seed, streams::kData);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Centers at pairwise distance `separation`.
  Matrix centers(spec.classes, spec.dim);
  const double radius = spec.separation / std::sqrt(2.0);
  for (size_t k = 0; k < spec.classes; ++k) {
    if (spec.classes <= spec.dim) {
      centers(k, k) = radius;
      continue;
    }
    std::vector<double> dir(spec.dim);
    for (double& x : dir) x = normal(rng);
    const double len = L2Norm(dir);
    for (size_t c = 0; c < spec.dim; ++c) centers(k, c) = radius * dir[c] / len;
  }

  std::vector<size_t> labels(spec.n);
  for (size_t i = 0; i < spec.n; ++i) labels[i] = i % spec.classes;
  std::shuffle(labels.begin(), labels.end(), rng);

  LabeledDataset data;
  data.classes = spec.classes;
  data.provenance = "synthetic:" + std::to_string(spec.seed);
  data.features = Matrix(spec.n, spec.dim);
  data.labels = labels;
  data.source_ids.resize(spec.n);
  std::iota(data.source_ids.begin(), data.source_ids.end(), size_t{0});
  for (size_t i = 0; i < spec.n; ++i) {
    for (size_t c = 0; c < spec.dim; ++c) {
      data.features(i, c) = centers(labels[i], c) + normal(rng) + spec.shift;
    }
  }
  return data;
}

LabeledDataset SynthBlobs(size_t n, size_t dim, size_t classes,
                          double separation, uint64_t seed) {
  return SynthBlobs(BlobsSpec{.n = n,
                              .dim = dim,
                              .classes = classes,
                              .separation = separation,
                              .seed = seed});
}

std::pair<LabeledDataset, LabeledDataset> SplitAt(const LabeledDataset& data,
                                                  size_t n_first) {
  if (n_first > data.size()) throw std::invalid_argument("split beyond dataset size");
  std::vector<size_t> first(n_first), rest(data.size() - n_first);
  std::iota(first.begin(), first.end(), size_t{0});
  std::iota(rest.begin(), rest.end(), n_first);
  return {data.Select(first), data.Select(rest)};
}

LabeledDataset CorruptLabels(const LabeledDataset& data, double alpha,
                             uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("corruption alpha must lie in [0, 1]");
  }
  LabeledDataset out = data;
  out.corruption_alpha = alpha;
  const size_t count =
      static_cast<size_t>(std::floor(alpha * static_cast<double>(data.size())));
  if (count == 0) return out;
  if (data.classes < 2) throw std::invalid_argument("need at least 2 classes");

  Rng rng = DeriveRng(seed, streams::kCorruption);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(count);
  std::sort(order.begin(), order.end());

  std::uniform_int_distribution<size_t> offset(1, data.classes - 1);
  for (size_t i : order) {
    out.labels[i] = (out.labels[i] + offset(rng)) % data.classes;
  }
  out.corrupted_indices = order;
  return out;
}

double ZeroOneLoss(const Model& model, std::span<const double> params,
                   const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  size_t wrong = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (model.Predict(params, data.features.row(i)) != data.labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double MeanCrossEntropy(const Model& model, std::span<const double> params,
                        const LabeledDataset& data) {
  if (data.size() == 0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    total += model.CrossEntropy(params, data.features.row(i), data.labels[i]).loss;
  }
  return total / static_cast<double>(data.size());
}

GapRow MeasureGap(const Model& model, std::span<const double> params,
                  const LabeledDataset& train, const LabeledDataset& test,
                  EvalLoss loss) {
  // Identical sets are allowed (gap 0); partial overlap is not.
  if (train.provenance == test.provenance && !(train == test)) {
    const std::set<size_t> ids(train.source_ids.begin(), train.source_ids.end());
    for (size_t id : test.source_ids) {
      if (ids.contains(id)) {
        throw std::invalid_argument("train and test sets overlap at source id " +
                                    std::to_string(id));
      }
    }
  }
  GapRow row;
  if (loss == EvalLoss::kZeroOne) {
    row.train_loss = ZeroOneLoss(model, params, train);
    row.test_loss = ZeroOneLoss(model, params, test);
  } else {
    row.train_loss = MeanCrossEntropy(model, params, train);
    row.test_loss = MeanCrossEntropy(model, params, test);
  }
  row.gap = row.test_loss - row.train_loss;
  return row;
}

LabeledDataset ParseCsv(const std::string& text, const std::string& origin) {
  LabeledDataset data;
  data.provenance = "csv:" + origin;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  size_t max_label = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = SplitFields(line);
    if (fields.size() < 2) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": need at least one feature and a label");
    }
    std::vector<double> row(fields.size() - 1);
    bool numeric = true;
    for (size_t i = 0; i + 1 < fields.size(); ++i) {
      numeric = numeric && ParseDouble(fields[i], row[i]);
    }
    double label_value = 0.0;
    const bool label_numeric = ParseDouble(fields.back(), label_value);
    if (first && (!numeric || !label_numeric)) {
      first = false;  // header row
      continue;
    }
    first = false;
    if (!numeric) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": non-numeric feature");
    }
    size_t label = 0;
    if (!ParseLabel(fields.back(), label)) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": label '" + std::string(fields.back()) +
                               "' is not a nonnegative integer");
    }
    if (data.features.rows() > 0 && row.size() != data.features.cols()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": expected " +
                               std::to_string(data.features.cols() + 1) +
                               " fields, got " + std::to_string(fields.size()));
    }
    data.features.AppendRow(row);
    data.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  if (data.labels.empty()) throw std::runtime_error(origin + ": no data rows");
  data.classes = std::max<size_t>(2, max_label + 1);
  data.source_ids.resize(data.labels.size());
  std::iota(data.source_ids.begin(), data.source_ids.end(), size_t{0});
  return data;
}

LabeledDataset LoadCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCsv(buf.str(), path);
}

std::string FormatCsv(const LabeledDataset& data) {
  std::string out;
  char buf[32];
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t c = 0; c < data.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g,", data.features(i, c));
      out += buf;
    }
    out += std::to_string(data.labels[i]);
    out += '\n';
  }
  return out;
}

void SaveCsv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << FormatCsv(data);
}

}  // namespace noisybound
