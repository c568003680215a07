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

#include "noisybound/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace noisybound {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> items;
  s = Trim(s);
  if (s.empty()) return items;
  size_t start = 0;
  while (true) {
    const size_t comma = s.find(',', start);
    items.push_back(Trim(s.substr(start, comma == std::string_view::npos
                                             ? std::string_view::npos
                                             : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

// Shortest text that parses back to the same double.
std::string FormatDouble(double v) {
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void Parse(const std::string& key, std::string_view v, double& out) {
  v = Trim(v);
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key, "expected a real number, got '" + std::string(v) + "'");
  }
}

template <typename Int>
void ParseInt(const std::string& key, std::string_view v, Int& out) {
  v = Trim(v);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key, "expected a nonnegative integer, got '" +
                               std::string(v) + "'");
  }
}

static_assert(std::is_same_v<uint64_t, size_t>, "seeds are parsed as size_t");

void Parse(const std::string& key, std::string_view v, size_t& out) {
  ParseInt(key, v, out);
}

void Parse(const std::string& key, std::string_view v, bool& out) {
  v = Trim(v);
  if (v == "true") {
    out = true;
  } else if (v == "false") {
    out = false;
  } else {
    throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
  }
}

void Parse(const std::string&, std::string_view v, std::string& out) {
  out = std::string(Trim(v));
}

template <typename T>
void Parse(const std::string& key, std::string_view v, std::vector<T>& out) {
  out.clear();
  for (std::string_view item : SplitList(v)) {
    T x{};
    Parse(key, item, x);
    out.push_back(std::move(x));
  }
}

std::string Format(double v) { return FormatDouble(v); }
std::string Format(size_t v) { return std::to_string(v); }
std::string Format(bool v) { return v ? "true" : "false"; }
std::string Format(const std::string& v) { return v; }

template <typename T>
std::string Format(const std::vector<T>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += Format(v[i]);
  }
  return out;
}

std::string TypeName(double) { return "real"; }
std::string TypeName(size_t) { return "integer"; }
std::string TypeName(bool) { return "bool"; }
std::string TypeName(const std::string&) { return "string"; }
template <typename T>
std::string TypeName(const std::vector<T>&) {
  return "list of " + TypeName(T{});
}

struct Field {
  std::string key;
  std::string type;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Access>
Field MakeField(std::string key, Access access) {
  RunConfig defaults;
  Field f;
  f.key = key;
  f.type = TypeName(access(defaults));
  f.set = [key, access](RunConfig& c, std::string_view v) { Parse(key, v, access(c)); };
  f.get = [access](const RunConfig& c) {
    return Format(access(const_cast<RunConfig&>(c)));
  };
  return f;
}

#define NB_FIELD(key, member) \
  MakeField(key, [](RunConfig& c) -> auto& { return c.member; })

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      NB_FIELD("experiment", experiment),
      NB_FIELD("divergence.noises", divergence.noises),
      NB_FIELD("divergence.divergences", divergence.divergences),
      NB_FIELD("divergence.shifts", divergence.shifts),
      NB_FIELD("divergence.scales", divergence.scales),
      NB_FIELD("data.kind", data.kind),
      NB_FIELD("data.n_train", data.n_train),
      NB_FIELD("data.n_test", data.n_test),
      NB_FIELD("data.dim", data.dim),
      NB_FIELD("data.classes", data.classes),
      NB_FIELD("data.separation", data.separation),
      NB_FIELD("data.corruption", data.corruption),
      NB_FIELD("data.corrupt_test", data.corrupt_test),
      NB_FIELD("data.train_path", data.train_path),
      NB_FIELD("data.test_path", data.test_path),
      NB_FIELD("model.kind", model.kind),
      NB_FIELD("model.hidden", model.hidden),
      NB_FIELD("optim.algorithm", optim.algorithm),
      NB_FIELD("optim.schedule", optim.schedule),
      NB_FIELD("optim.batch_size", optim.batch_size),
      NB_FIELD("optim.epochs", optim.epochs),
      NB_FIELD("optim.iterations", optim.iterations),
      NB_FIELD("optim.report_every", optim.report_every),
      NB_FIELD("optim.lr", optim.lr),
      NB_FIELD("optim.lr_decay_rate", optim.lr_decay_rate),
      NB_FIELD("optim.lr_decay_steps", optim.lr_decay_steps),
      NB_FIELD("optim.beta_scale", optim.beta_scale),
      NB_FIELD("optim.noise", optim.noise),
      NB_FIELD("optim.noise_scale", optim.noise_scale),
      NB_FIELD("optim.clip", optim.clip),
      NB_FIELD("optim.clip_norm", optim.clip_norm),
      NB_FIELD("optim.domain", optim.domain),
      NB_FIELD("optim.radius", optim.radius),
      NB_FIELD("optim.box_lo", optim.box_lo),
      NB_FIELD("optim.box_hi", optim.box_hi),
      NB_FIELD("optim.stats", optim.stats),
      NB_FIELD("optim.holdout_size", optim.holdout_size),
      NB_FIELD("optim.output", optim.output),
      NB_FIELD("optim.init", optim.init),
      NB_FIELD("optim.projected_sgld", optim.projected_sgld),
      NB_FIELD("bounds.list", bounds.list),
      NB_FIELD("bounds.A", bounds.A),
      NB_FIELD("bounds.sigma", bounds.sigma),
      NB_FIELD("bounds.chi2_variance", bounds.chi2_variance),
      NB_FIELD("bounds.use_decay", bounds.use_decay),
      NB_FIELD("fed.clients", fed.clients),
      NB_FIELD("fed.per_round", fed.per_round),
      NB_FIELD("fed.rounds", fed.rounds),
      NB_FIELD("fed.local_steps", fed.local_steps),
      NB_FIELD("fed.client_shift", fed.client_shift),
      NB_FIELD("fed.n_per_client", fed.n_per_client),
      NB_FIELD("fed.n_test_per_client", fed.n_test_per_client),
      NB_FIELD("sweep.axis", sweep.axis),
      NB_FIELD("sweep.values", sweep.values),
      NB_FIELD("run.seeds", run.seeds),
      NB_FIELD("run.workers", run.workers),
      NB_FIELD("run.timestamp", run.timestamp),
  };
  return fields;
}

#undef NB_FIELD

void RequireOneOf(const std::string& field, const std::string& value,
                  std::initializer_list<const char*> allowed) {
  std::string list;
  for (const char* a : allowed) {
    if (value == a) return;
    if (!list.empty()) list += ", ";
    list += a;
  }
  throw ConfigError(field, "'" + value + "' is not one of {" + list + "}");
}

void RequirePositive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive");
}

}  // namespace

RunConfig ParseConfig(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    // A '#' at the start of a line or after whitespace begins a comment.
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line = line.substr(0, i);
        break;
      }
    }
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = line.substr(eq + 1);
    const auto& fields = Fields();
    const auto it = std::find_if(fields.begin(), fields.end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == fields.end()) {
      throw ConfigError(key, "unknown key (line " + std::to_string(line_no) + ")");
    }
    if (!seen.insert(key).second) {
      throw ConfigError(key, "repeated key (line " + std::to_string(line_no) + ")");
    }
    it->set(config, value);
  }
  return config;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str());
}

std::string SerializeConfig(const RunConfig& config) {
  std::string out;
  for (const Field& f : Fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

std::string ConfigSchema() {
  const RunConfig defaults;
  std::string out;
  for (const Field& f : Fields()) {
    out += f.key + " (" + f.type + ") = " + f.get(defaults) + "\n";
  }
  return out;
}

void ValidateConfig(const RunConfig& c) {
  RequireOneOf("experiment", c.experiment, {"divergence", "train", "fed", "sweep"});
  for (const std::string& s : c.divergence.noises) {
    RequireOneOf("divergence.noises", s, {"gaussian", "laplace", "uniform"});
  }
  for (const std::string& s : c.divergence.divergences) {
    RequireOneOf("divergence.divergences", s, {"kl", "tv", "chi2"});
  }
  for (double m : c.divergence.scales) RequirePositive("divergence.scales", m);
  for (double s : c.divergence.shifts) {
    if (!std::isfinite(s)) throw ConfigError("divergence.shifts", "must be finite");
  }
  if (c.experiment == "divergence") return;

  RequireOneOf("data.kind", c.data.kind, {"blobs", "csv"});
  if (c.data.kind == "csv") {
    if (c.data.train_path.empty()) throw ConfigError("data.train_path", "required for csv data");
    if (c.data.test_path.empty()) throw ConfigError("data.test_path", "required for csv data");
  } else {
    if (c.data.n_train < 2) throw ConfigError("data.n_train", "must be at least 2");
    if (c.data.n_test < 1) throw ConfigError("data.n_test", "must be at least 1");
    if (c.data.dim < 1) throw ConfigError("data.dim", "must be at least 1");
    if (c.data.classes < 2) throw ConfigError("data.classes", "must be at least 2");
  }
  if (!(c.data.separation >= 0.0)) throw ConfigError("data.separation", "must be >= 0");
  if (!(c.data.corruption >= 0.0 && c.data.corruption <= 1.0)) {
    throw ConfigError("data.corruption", "must lie in [0, 1]");
  }
  RequireOneOf("model.kind", c.model.kind, {"logistic", "mlp"});
  if (c.model.kind == "mlp") {
    if (c.model.hidden.empty()) throw ConfigError("model.hidden", "mlp needs hidden widths");
    for (size_t h : c.model.hidden) {
      if (h == 0) throw ConfigError("model.hidden", "widths must be positive");
    }
  }

  const OptimConfig& o = c.optim;
  RequireOneOf("optim.algorithm", o.algorithm, {"noisy", "dp_sgd", "sgld"});
  RequireOneOf("optim.schedule", o.schedule,
               {"auto", "without_replacement", "partition", "sequential"});
  if (o.batch_size < 2) throw ConfigError("optim.batch_size", "must be at least 2");
  if (o.report_every < 1) throw ConfigError("optim.report_every", "must be at least 1");
  if (!(o.lr >= 0.0)) throw ConfigError("optim.lr", "must be >= 0");
  if (!(o.lr_decay_rate > 0.0)) throw ConfigError("optim.lr_decay_rate", "must be > 0");
  RequirePositive("optim.beta_scale", o.beta_scale);
  RequireOneOf("optim.noise", o.noise, {"gaussian", "laplace", "uniform"});
  if (o.algorithm == "sgld" && o.noise != "gaussian") {
    throw ConfigError("optim.noise", "sgld uses gaussian noise");
  }
  if (!(o.noise_scale >= 0.0)) throw ConfigError("optim.noise_scale", "must be >= 0");
  if (!(o.clip >= 0.0)) throw ConfigError("optim.clip", "must be >= 0 (0 disables)");
  RequireOneOf("optim.clip_norm", o.clip_norm, {"l1", "l2"});
  RequireOneOf("optim.domain", o.domain, {"none", "l2_ball", "l1_ball", "box"});
  if ((o.domain == "l2_ball" || o.domain == "l1_ball")) {
    RequirePositive("optim.radius", o.radius);
  }
  if (o.domain == "box") {
    if (o.box_lo.empty()) throw ConfigError("optim.box_lo", "required for a box");
    if (o.box_hi.empty()) throw ConfigError("optim.box_hi", "required for a box");
  }
  RequireOneOf("optim.stats", o.stats, {"in_batch", "holdout"});
  if (o.stats == "holdout" && o.holdout_size < 2) {
    throw ConfigError("optim.holdout_size", "must be at least 2");
  }
  RequireOneOf("optim.output", o.output, {"last", "average", "argmin_loss"});
  RequireOneOf("optim.init", o.init, {"fan_in", "domain_uniform"});

  for (const std::string& b : c.bounds.list) {
    RequireOneOf("bounds.list", b,
                 {"sgld", "sgld_trajectory", "dp_kl", "dp_tv", "dp_chi2",
                  "generic_kl", "generic_tv", "generic_chi2"});
  }
  for (const std::string& b : c.bounds.list) {
    if (b.rfind("dp_", 0) != 0) continue;
    if (o.algorithm != "dp_sgd") {
      throw ConfigError("bounds.list", b + " needs optim.algorithm = dp_sgd");
    }
    if (o.lr_decay_rate != 1.0) {
      throw ConfigError("optim.lr_decay_rate", b + " needs a constant rate (1)");
    }
  }
  RequirePositive("bounds.A", c.bounds.A);
  if (!(c.bounds.sigma >= 0.0)) throw ConfigError("bounds.sigma", "must be >= 0");
  RequireOneOf("bounds.chi2_variance", c.bounds.chi2_variance, {"bounded", "heldout"});

  if (c.experiment == "fed") {
    const FedSection& f = c.fed;
    if (f.clients < 1) throw ConfigError("fed.clients", "must be at least 1");
    if (f.per_round < 1 || f.per_round > f.clients) {
      throw ConfigError("fed.per_round", "must lie in [1, fed.clients]");
    }
    if (f.rounds < 1) throw ConfigError("fed.rounds", "must be at least 1");
    if (f.local_steps < 1) throw ConfigError("fed.local_steps", "must be at least 1");
    if (f.n_per_client < o.batch_size) {
      throw ConfigError("fed.n_per_client", "must be at least optim.batch_size");
    }
    if (f.n_test_per_client < 1) {
      throw ConfigError("fed.n_test_per_client", "must be at least 1");
    }
  }
  if (c.experiment == "sweep") {
    RequireOneOf("sweep.axis", c.sweep.axis, {"corruption", "width", "n", "noise_scale"});
    if (c.sweep.values.empty()) throw ConfigError("sweep.values", "must not be empty");
    for (double v : c.sweep.values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ConfigError("sweep.values", "must be finite and nonnegative");
      }
      if ((c.sweep.axis == "width" || c.sweep.axis == "n") &&
          (v != std::floor(v) || v < 1.0)) {
        throw ConfigError("sweep.values", "must be positive integers for this axis");
      }
      if (c.sweep.axis == "corruption" && v > 1.0) {
        throw ConfigError("sweep.values", "corruption levels must lie in [0, 1]");
      }
    }
  }
  if (c.run.seeds.empty()) throw ConfigError("run.seeds", "must not be empty");
}

}  // namespace noisybound
