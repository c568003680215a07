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

#include "noisybound/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "noisybound/bound_engine.h"
#include "noisybound/fed_sim.h"
#include "noisybound/noise_channels.h"
#include "noisybound/rng.h"

namespace noisybound {
namespace {

Algorithm ParseAlgorithm(const std::string& s) {
  if (s == "noisy") return Algorithm::kNoisy;
  if (s == "dp_sgd") return Algorithm::kDpSgd;
  return Algorithm::kSgld;
}

OutputSelector ParseOutput(const std::string& s) {
  if (s == "average") return OutputSelector::kAverage;
  if (s == "argmin_loss") return OutputSelector::kArgminLoss;
  return OutputSelector::kLastIterate;
}

Norm ParseNorm(const std::string& s) { return s == "l1" ? Norm::kL1 : Norm::kL2; }

NoiseModel BuildNoise(const OptimConfig& o) {
  const NoiseKind kind = ParseNoiseKind(o.noise);
  if (kind == NoiseKind::kUniform) return NoiseModel(kind, ParseNorm(o.clip_norm));
  return NoiseModel(kind);
}

std::string ResolvedSchedule(const OptimConfig& o) {
  if (o.schedule != "auto") return o.schedule;
  return o.algorithm == "sgld" ? "partition" : "without_replacement";
}

// Parameter reported at a checkpoint under each output selector.
class OutputTracker {
 public:
  OutputTracker(const Model& model, const LabeledDataset& train,
                OutputSelector selector, const ParamVector& w0)
      : model_(model), train_(train), selector_(selector), sum_(w0.size(), 0.0),
        best_(w0) {}

  void Observe(size_t t, std::span<const double> w) {
    for (size_t i = 0; i < w.size(); ++i) sum_[i] += w[i];
    if (selector_ == OutputSelector::kArgminLoss) {
      const double loss = MeanCrossEntropy(model_, w, train_);
      if (loss < best_loss_) {
        best_loss_ = loss;
        best_.assign(w.begin(), w.end());
      }
    }
    last_.assign(w.begin(), w.end());
    t_ = t;
  }

  ParamVector Current() const {
    if (selector_ == OutputSelector::kAverage) {
      ParamVector avg = sum_;
      for (double& x : avg) x /= static_cast<double>(t_);
      return avg;
    }
    if (selector_ == OutputSelector::kArgminLoss) return best_;
    return last_;
  }

 private:
  const Model& model_;
  const LabeledDataset& train_;
  OutputSelector selector_;
  ParamVector sum_;
  ParamVector best_;
  ParamVector last_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  size_t t_ = 0;
};

struct BoundPlan {
  std::string name;
  BoundSpec spec;
  bool heldout_variance = false;
};

std::vector<BoundPlan> PlanBounds(const RunConfig& c, size_t n) {
  std::vector<BoundPlan> plans;
  const BoundsConfig& b = c.bounds;
  const LossAssumption kl_assumption =
      b.sigma > 0.0 ? LossAssumption(SubGaussian{b.sigma}) : LossAssumption(Bounded{b.A});
  for (const std::string& name : b.list) {
    BoundPlan p;
    p.name = name;
    p.spec.n = n;
    p.spec.use_decay = b.use_decay;
    const std::string suffix = name.substr(name.rfind('_') + 1);
    if (name == "sgld" || name == "sgld_trajectory" || suffix == "kl") {
      p.spec.divergence = DivergenceKind::kKL;
      p.spec.assumption = kl_assumption;
    } else if (suffix == "tv") {
      p.spec.divergence = DivergenceKind::kTV;
      p.spec.assumption = Bounded{b.A};
    } else {
      p.spec.divergence = DivergenceKind::kChi2;
      p.spec.assumption = Bounded{b.A};
      p.heldout_variance = b.chi2_variance == "heldout";
    }
    plans.push_back(p);
  }
  return plans;
}

std::vector<double> PerExampleZeroOne(const Model& model, std::span<const double> w,
                                      const LabeledDataset& data) {
  std::vector<double> losses(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    losses[i] = model.Predict(w, data.features.row(i)) == data.labels[i] ? 0.0 : 1.0;
  }
  return losses;
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double SampleStd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string Join(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\n";
}

std::vector<double> RowValues(const CheckpointRow& r) {
  std::vector<double> v = {r.train_loss01, r.test_loss01, r.gap};
  v.insert(v.end(), r.bounds.begin(), r.bounds.end());
  v.push_back(r.grad_var_mean);
  return v;
}

std::vector<std::string> ValueHeader(const RunConfig& c) {
  std::vector<std::string> h = {"train_loss01", "test_loss01", "gap"};
  for (const std::string& b : c.bounds.list) h.push_back(b);
  h.push_back("grad_var_mean");
  return h;
}

// Column-wise mean and sample standard deviation of equally long rows.
std::pair<std::vector<double>, std::vector<double>> MeanStd(
    const std::vector<std::vector<double>>& rows) {
  const size_t cols = rows.front().size();
  std::vector<double> mean(cols), stddev(cols);
  for (size_t c = 0; c < cols; ++c) {
    std::vector<double> column;
    for (const auto& r : rows) column.push_back(r[c]);
    mean[c] = Mean(column);
    stddev[c] = SampleStd(column);
  }
  return {mean, stddev};
}

void AppendValues(std::vector<std::string>& cells, std::span<const double> values) {
  for (double v : values) cells.push_back(FormatCsvValue(v));
}

uint64_t ClientDataSeed(uint64_t seed, size_t k) {
  Rng rng = DeriveRng(seed, streams::kData, k + 1);
  return rng();
}

}  // namespace

std::string FormatCsvValue(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double SpearmanRho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("rank inputs differ in length");
  const size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  auto ranks = [n](std::span<const double> v) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    for (size_t i = 0; i < n;) {
      size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double mx = Mean(rx), my = Mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

size_t ResolveWorkers(const RunConfig& config) {
  if (config.run.workers > 0) return config.run.workers;
  if (const char* env = std::getenv("NOISYBOUND_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<size_t>(v);
  }
  return std::max<size_t>(1, std::thread::hardware_concurrency());
}

void ParallelFor(size_t count, size_t workers,
                 const std::function<void(size_t)>& fn) {
  workers = std::max<size_t>(1, std::min(workers, count));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> threads;
    for (size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::pair<LabeledDataset, LabeledDataset> BuildData(const RunConfig& config,
                                                    uint64_t seed) {
  const DataConfig& d = config.data;
  LabeledDataset train, test;
  if (d.kind == "csv") {
    train = LoadCsv(d.train_path);
    test = LoadCsv(d.test_path);
    const size_t classes = std::max(train.classes, test.classes);
    train.classes = test.classes = classes;
  } else {
    BlobsSpec spec{.n = d.n_train + d.n_test,
                   .dim = d.dim,
                   .classes = d.classes,
                   .separation = d.separation,
                   .seed = seed};
    std::tie(train, test) = SplitAt(SynthBlobs(spec), d.n_train);
  }
  if (d.corruption > 0.0) {
    train = CorruptLabels(train, d.corruption, seed);
    if (d.corrupt_test) test = CorruptLabels(test, d.corruption, seed + 1);
  }
  return {std::move(train), std::move(test)};
}

Model BuildModel(const RunConfig& config, size_t input_dim, size_t classes) {
  if (config.model.kind == "logistic") return Model::Logistic(input_dim, classes);
  return Model::Mlp(input_dim, config.model.hidden, classes);
}

DomainSpec BuildDomain(const OptimConfig& o) {
  if (o.domain == "l2_ball") return DomainSpec::L2Ball(o.radius);
  if (o.domain == "l1_ball") return DomainSpec::L1Ball(o.radius);
  if (o.domain == "box") return DomainSpec::Box(o.box_lo, o.box_hi);
  return DomainSpec::None();
}

SeedRun TrainSeed(const RunConfig& config, uint64_t seed) {
  const OptimConfig& o = config.optim;
  auto [train, test] = BuildData(config, seed);
  const Model model = BuildModel(config, train.dim(), train.classes);
  const DomainSpec domain = BuildDomain(o);
  const size_t n = train.size(), b = o.batch_size;

  const std::string kind = ResolvedSchedule(o);
  BatchSchedule schedule;
  size_t spacing = o.report_every;
  if (kind == "partition") {
    schedule = EpochPartitionSchedule(n, b, o.epochs, seed);
    spacing = n / b;
  } else {
    const size_t T = o.iterations > 0 ? o.iterations : n / b;
    schedule = kind == "sequential" ? SequentialSchedule(n, b, T)
                                    : WithoutReplacementSchedule(n, b, T, seed);
  }
  const size_t T = schedule.iterations();
  std::vector<size_t> checkpoints = {0};
  for (size_t t = spacing; t <= T; t += spacing) checkpoints.push_back(t);
  if (checkpoints.back() != T) checkpoints.push_back(T);

  const std::vector<BoundPlan> plans = PlanBounds(config, n);
  bool need_samples = false;
  for (const BoundPlan& p : plans) need_samples |= p.name.starts_with("generic_");

  TrainingConfig tc;
  tc.algorithm = ParseAlgorithm(o.algorithm);
  tc.noise = BuildNoise(o);
  tc.domain = domain;
  if (o.clip > 0.0) tc.clip = o.clip;
  tc.clip_norm = ParseNorm(o.clip_norm);
  tc.learning_rate = {o.lr, o.lr_decay_rate, o.lr_decay_steps};
  tc.noise_scale = o.noise_scale;
  tc.beta_scale = o.beta_scale;
  tc.projected_sgld = o.projected_sgld;
  tc.stats_source = o.stats == "holdout" ? SampleSource::kHoldOut : SampleSource::kInBatch;
  tc.holdout_size = o.holdout_size;
  tc.holdout_pool = &test;
  tc.output = ParseOutput(o.output);
  tc.retain_samples = need_samples;
  tc.seed = seed;

  const ParamVector w0 = InitialPoint(
      model, domain, o.init == "domain_uniform" ? InitKind::kDomainUniform : InitKind::kFanIn,
      seed);
  OutputTracker tracker(model, train, tc.output, w0);
  std::map<size_t, ParamVector> at_checkpoint = {{0, w0}};
  size_t next_checkpoint = 1;
  const IterateObserver observer = [&](size_t t, std::span<const double> w) {
    tracker.Observe(t, w);
    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      at_checkpoint[t] = tracker.Current();
      ++next_checkpoint;
    }
  };
  TrainingResult result = RunTraining(model, train, schedule, tc, w0, observer);
  TrajectoryRecord& record = result.record;

  // Pair costs of the generic bounds depend only on each iteration, so they
  // are computed once and reassembled for every prefix.
  std::map<std::string, std::vector<ChannelValue>> generic_costs;
  for (const BoundPlan& p : plans) {
    if (p.name.starts_with("generic_") && !generic_costs.contains(p.name)) {
      generic_costs[p.name] = GenericCosts(record, p.spec.divergence, seed);
    }
  }
  for (IterationRecord& it : record.iterations) it.samples.reset();
  std::vector<size_t> batch_sizes;
  for (const IterationRecord& it : record.iterations) batch_sizes.push_back(it.config.b);

  SeedRun run;
  run.seed = seed;
  size_t previous = 0;
  for (size_t tc_index = 0; tc_index < checkpoints.size(); ++tc_index) {
    const size_t Tc = checkpoints[tc_index];
    const ParamVector& w = at_checkpoint.at(Tc);
    CheckpointRow row;
    row.epoch = tc_index;
    row.iteration = Tc;
    const GapRow gap = MeasureGap(model, w, train, test);
    row.train_loss01 = gap.train_loss;
    row.test_loss01 = gap.test_loss;
    row.gap = gap.gap;
    double var_sum = 0.0;
    for (size_t t = previous; t < Tc; ++t) var_sum += record.iterations[t].stats.variance;
    row.grad_var_mean = Tc > previous ? var_sum / static_cast<double>(Tc - previous) : 0.0;
    previous = Tc;

    const TrajectoryRecord prefix = record.Prefix(Tc);
    for (const BoundPlan& plan : plans) {
      BoundSpec spec = plan.spec;
      if (plan.heldout_variance) {
        spec.assumption = FiniteVariance{LossVariance(PerExampleZeroOne(model, w, test))};
      }
      double value = 0.0;
      if (Tc > 0) {
        if (plan.name == "sgld") {
          value = SgldBound(prefix, spec).total;
        } else if (plan.name == "sgld_trajectory") {
          value = SgldTrajectoryBound(prefix, spec).total;
        } else if (plan.name.starts_with("dp_")) {
          value = record.noise.kind() == NoiseKind::kLaplace
                      ? DpSgdBoundLaplace(prefix, spec).total
                      : DpSgdBoundGaussian(prefix, spec).total;
        } else {
          const std::vector<ChannelValue>& costs = generic_costs.at(plan.name);
          value = GenericBoundFromCosts(
                      std::span(costs).first(Tc), std::span(batch_sizes).first(Tc),
                      DecayProducts(record, Tc), spec)
                      .total;
        }
      }
      row.bounds.push_back(value);
    }
    run.rows.push_back(std::move(row));
  }
  return run;
}

RunConfig ApplySweepValue(const RunConfig& config, double value) {
  RunConfig c = config;
  const std::string& axis = config.sweep.axis;
  if (axis == "corruption") {
    c.data.corruption = value;
  } else if (axis == "width") {
    for (size_t& h : c.model.hidden) h = static_cast<size_t>(value);
  } else if (axis == "n") {
    c.data.n_train = static_cast<size_t>(value);
  } else {
    c.optim.noise_scale = value;
  }
  return c;
}

std::string RunDivergenceCsv(const RunConfig& config) {
  std::string out = "noise,f,shift,m,closed_form,oracle,abs_diff,exactness\n";
  for (const std::string& noise_name : config.divergence.noises) {
    const NoiseModel noise(ParseNoiseKind(noise_name));
    for (const std::string& f_name : config.divergence.divergences) {
      const DivergenceKind f = ParseDivergenceKind(f_name);
      for (double shift : config.divergence.shifts) {
        for (double m : config.divergence.scales) {
          const ChannelValue closed = Cost1d(f, noise, shift, m);
          const double oracle = OracleDivergence1d(f, noise, shift, m);
          const double diff = (std::isinf(closed.value) && std::isinf(oracle))
                                  ? 0.0
                                  : std::abs(closed.value - oracle);
          out += Join({noise_name, f_name, FormatCsvValue(shift), FormatCsvValue(m),
                       FormatCsvValue(closed.value), FormatCsvValue(oracle),
                       FormatCsvValue(diff), std::string(ToString(closed.exactness))});
        }
      }
    }
  }
  return out;
}

std::string RunTrainCsv(const RunConfig& config) {
  const std::vector<uint64_t>& seeds = config.run.seeds;
  std::vector<SeedRun> runs(seeds.size());
  ParallelFor(seeds.size(), ResolveWorkers(config),
              [&](size_t i) { runs[i] = TrainSeed(config, seeds[i]); });

  std::vector<std::string> header = {"seed", "epoch", "iteration"};
  for (const std::string& h : ValueHeader(config)) header.push_back(h);
  std::string out = Join(header);
  for (const SeedRun& run : runs) {
    for (const CheckpointRow& r : run.rows) {
      std::vector<std::string> cells = {std::to_string(run.seed), std::to_string(r.epoch),
                                        std::to_string(r.iteration)};
      AppendValues(cells, RowValues(r));
      out += Join(cells);
    }
  }
  const size_t rows = runs.front().rows.size();
  for (size_t e = 0; e < rows; ++e) {
    std::vector<std::vector<double>> values;
    for (const SeedRun& run : runs) values.push_back(RowValues(run.rows[e]));
    const auto [mean, stddev] = MeanStd(values);
    const CheckpointRow& r = runs.front().rows[e];
    for (const auto& [label, v] : {std::pair{"mean", mean}, std::pair{"std", stddev}}) {
      std::vector<std::string> cells = {label, std::to_string(r.epoch),
                                        std::to_string(r.iteration)};
      AppendValues(cells, v);
      out += Join(cells);
    }
  }
  return out;
}

std::string RunSweepCsv(const RunConfig& config) {
  const std::vector<double>& values = config.sweep.values;
  const std::vector<uint64_t>& seeds = config.run.seeds;
  std::vector<CheckpointRow> finals(values.size() * seeds.size());
  ParallelFor(finals.size(), ResolveWorkers(config), [&](size_t i) {
    const RunConfig point = ApplySweepValue(config, values[i / seeds.size()]);
    finals[i] = TrainSeed(point, seeds[i % seeds.size()]).rows.back();
  });

  const std::vector<std::string> value_header = ValueHeader(config);
  std::vector<std::vector<double>> means, stds;
  for (size_t v = 0; v < values.size(); ++v) {
    std::vector<std::vector<double>> rows;
    for (size_t s = 0; s < seeds.size(); ++s) {
      rows.push_back(RowValues(finals[v * seeds.size() + s]));
    }
    auto [mean, stddev] = MeanStd(rows);
    means.push_back(std::move(mean));
    stds.push_back(std::move(stddev));
  }
  // Rank correlation of the mean gap and of each mean bound with the axis.
  std::vector<double> rho;
  std::vector<std::string> rho_header = {"spearman_gap"};
  std::vector<size_t> rho_columns = {2};
  for (size_t b = 0; b < config.bounds.list.size(); ++b) {
    rho_header.push_back("spearman_" + config.bounds.list[b]);
    rho_columns.push_back(3 + b);
  }
  for (size_t col : rho_columns) {
    std::vector<double> y;
    for (const auto& m : means) y.push_back(m[col]);
    rho.push_back(SpearmanRho(values, y));
  }

  std::vector<std::string> header = {"axis", "value", "seed"};
  header.insert(header.end(), value_header.begin(), value_header.end());
  header.insert(header.end(), rho_header.begin(), rho_header.end());
  std::string out = Join(header);
  const std::vector<std::string> blanks(rho.size(), "");
  for (size_t v = 0; v < values.size(); ++v) {
    for (size_t s = 0; s < seeds.size(); ++s) {
      std::vector<std::string> cells = {config.sweep.axis, FormatCsvValue(values[v]),
                                        std::to_string(seeds[s])};
      AppendValues(cells, RowValues(finals[v * seeds.size() + s]));
      cells.insert(cells.end(), blanks.begin(), blanks.end());
      out += Join(cells);
    }
    std::vector<std::string> mean_cells = {config.sweep.axis, FormatCsvValue(values[v]),
                                           "mean"};
    AppendValues(mean_cells, means[v]);
    AppendValues(mean_cells, rho);
    out += Join(mean_cells);
    std::vector<std::string> std_cells = {config.sweep.axis, FormatCsvValue(values[v]),
                                          "std"};
    AppendValues(std_cells, stds[v]);
    std_cells.insert(std_cells.end(), blanks.begin(), blanks.end());
    out += Join(std_cells);
  }
  return out;
}

std::string RunFedCsv(const RunConfig& config) {
  const FedSection& f = config.fed;
  const OptimConfig& o = config.optim;
  const std::vector<uint64_t>& seeds = config.run.seeds;
  // Per seed, per client: n_k, rounds participated, bound, losses, gap.
  std::vector<std::vector<std::vector<double>>> results(seeds.size());
  ParallelFor(seeds.size(), ResolveWorkers(config), [&](size_t i) {
    const uint64_t seed = seeds[i];
    std::vector<LabeledDataset> train, test;
    for (size_t k = 0; k < f.clients; ++k) {
      BlobsSpec spec{.n = f.n_per_client + f.n_test_per_client,
                     .dim = config.data.dim,
                     .classes = config.data.classes,
                     .separation = config.data.separation,
                     .seed = ClientDataSeed(seed, k),
                     .shift = f.client_shift * static_cast<double>(k)};
      auto [tr, te] = SplitAt(SynthBlobs(spec), f.n_per_client);
      if (config.data.corruption > 0.0) {
        tr = CorruptLabels(tr, config.data.corruption, seed + k);
      }
      train.push_back(std::move(tr));
      test.push_back(std::move(te));
    }
    const Model model = BuildModel(config, config.data.dim, config.data.classes);
    FedConfig fc;
    fc.clients = f.clients;
    fc.per_round = f.per_round;
    fc.rounds = f.rounds;
    fc.local_steps = f.local_steps;
    fc.eta = o.lr;
    fc.batch_size = o.batch_size;
    if (o.clip > 0.0) fc.clip = o.clip;
    fc.domain = BuildDomain(o);
    fc.seed = seed;
    const ParamVector w0 = InitialPoint(
        model, fc.domain,
        o.init == "domain_uniform" ? InitKind::kDomainUniform : InitKind::kFanIn, seed);
    const FedTrajectory traj = RunFed(model, fc, train, w0);
    for (size_t k = 0; k < f.clients; ++k) {
      const GapRow gap = MeasureGap(model, traj.final_params(), train[k], test[k]);
      const double bound = ClientBound(traj, k, config.bounds.A, train[k].size()).total;
      results[i].push_back({static_cast<double>(train[k].size()),
                            static_cast<double>(traj.RoundsOf(k).size()), bound,
                            gap.train_loss, gap.test_loss, gap.gap});
    }
  });

  std::string out =
      "seed,client,n_k,rounds_participated,bound,train_loss01,test_loss01,gap\n";
  for (size_t i = 0; i < seeds.size(); ++i) {
    for (size_t k = 0; k < f.clients; ++k) {
      const std::vector<double>& r = results[i][k];
      out += Join({std::to_string(seeds[i]), std::to_string(k),
                   std::to_string(static_cast<size_t>(r[0])),
                   std::to_string(static_cast<size_t>(r[1])), FormatCsvValue(r[2]),
                   FormatCsvValue(r[3]), FormatCsvValue(r[4]), FormatCsvValue(r[5])});
    }
  }
  for (size_t k = 0; k < f.clients; ++k) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < seeds.size(); ++i) rows.push_back(results[i][k]);
    const auto [mean, stddev] = MeanStd(rows);
    for (const auto& [label, v] : {std::pair{"mean", mean}, std::pair{"std", stddev}}) {
      std::vector<std::string> cells = {label, std::to_string(k)};
      AppendValues(cells, v);
      out += Join(cells);
    }
  }
  return out;
}

std::string RunExperimentCsv(const RunConfig& config) {
  ValidateConfig(config);
  if (config.experiment == "divergence") return RunDivergenceCsv(config);
  if (config.experiment == "train") return RunTrainCsv(config);
  if (config.experiment == "fed") return RunFedCsv(config);
  return RunSweepCsv(config);
}

}  // namespace noisybound
