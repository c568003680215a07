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

#ifndef NOISYBOUND_CONFIG_H_
#define NOISYBOUND_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace noisybound {

// A configuration problem tied to one key ("field path"), e.g. "optim.lr".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct DivergenceGrid {
  std::vector<std::string> noises = {"gaussian", "laplace", "uniform"};
  std::vector<std::string> divergences = {"kl", "tv", "chi2"};
  std::vector<double> shifts = {0.5, 1.0, 2.0};
  std::vector<double> scales = {1.0};

  friend bool operator==(const DivergenceGrid&, const DivergenceGrid&) = default;
};

struct DataConfig {
  std::string kind = "blobs";  // blobs | csv
  size_t n_train = 500;
  size_t n_test = 500;
  size_t dim = 2;
  size_t classes = 2;
  double separation = 4.0;
  double corruption = 0.0;
  bool corrupt_test = false;
  std::string train_path;
  std::string test_path;

  friend bool operator==(const DataConfig&, const DataConfig&) = default;
};

struct ModelConfig {
  std::string kind = "mlp";  // logistic | mlp
  std::vector<size_t> hidden = {16};

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct OptimConfig {
  std::string algorithm = "sgld";  // noisy | dp_sgd | sgld
  // without_replacement | partition | sequential; "auto" picks partition for
  // SGLD and without_replacement otherwise.
  std::string schedule = "auto";
  size_t batch_size = 50;
  size_t epochs = 200;     // passes over the partition
  size_t iterations = 0;   // without-replacement length; 0 uses floor(n / b)
  size_t report_every = 1; // without-replacement checkpoint spacing
  double lr = 0.03;
  double lr_decay_rate = 0.96;
  size_t lr_decay_steps = 2000;
  double beta_scale = 1e6;
  std::string noise = "gaussian";
  double noise_scale = 0.0;
  double clip = 0.0;  // 0 disables clipping
  std::string clip_norm = "l2";
  std::string domain = "none";  // none | l2_ball | l1_ball | box
  double radius = 0.0;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  std::string stats = "in_batch";  // in_batch | holdout
  size_t holdout_size = 64;
  std::string output = "last";     // last | average | argmin_loss
  std::string init = "domain_uniform";  // domain_uniform | fan_in
  bool projected_sgld = false;

  friend bool operator==(const OptimConfig&, const OptimConfig&) = default;
};

struct BoundsConfig {
  // Any of: sgld, sgld_trajectory, dp_kl, dp_tv, dp_chi2, generic_kl,
  // generic_tv, generic_chi2.
  std::vector<std::string> list = {"sgld"};
  double A = 1.0;
  // Sub-Gaussian constant for KL bounds; 0 uses A / 2.
  double sigma = 0.0;
  // bounded: sqrt(Var loss) <= A / 2; heldout: estimated from test losses.
  std::string chi2_variance = "bounded";
  bool use_decay = true;

  friend bool operator==(const BoundsConfig&, const BoundsConfig&) = default;
};

struct FedSection {
  size_t clients = 4;
  size_t per_round = 2;
  size_t rounds = 4;
  size_t local_steps = 5;
  double client_shift = 0.5;
  size_t n_per_client = 200;
  size_t n_test_per_client = 200;

  friend bool operator==(const FedSection&, const FedSection&) = default;
};

struct SweepConfig {
  std::string axis = "corruption";  // corruption | width | n | noise_scale
  std::vector<double> values = {0.0, 0.25, 0.5, 0.75};

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct RunSection {
  std::vector<uint64_t> seeds = {1, 2, 3, 4};
  size_t workers = 0;  // 0: environment variable, else hardware threads
  bool timestamp = true;

  friend bool operator==(const RunSection&, const RunSection&) = default;
};

struct RunConfig {
  std::string experiment = "train";  // divergence | train | fed | sweep
  DivergenceGrid divergence;
  DataConfig data;
  ModelConfig model;
  OptimConfig optim;
  BoundsConfig bounds;
  FedSection fed;
  SweepConfig sweep;
  RunSection run;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// "key = value" lines with dotted keys, '#' comments, and comma-separated
// lists. Unknown keys, malformed values, and repeated keys throw ConfigError.
RunConfig ParseConfig(const std::string& text);
RunConfig LoadConfig(const std::string& path);
// Every key in schema order; ParseConfig(SerializeConfig(c)) == c.
std::string SerializeConfig(const RunConfig& config);
// Checks cross-field constraints; throws ConfigError naming the field.
void ValidateConfig(const RunConfig& config);
// Documented key list with types and defaults, one per line.
std::string ConfigSchema();

}  // namespace noisybound

#endif  // NOISYBOUND_CONFIG_H_
