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

// Command-line front end: divergence, train, fed and sweep subcommands.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "noisybound/config.h"
#include "noisybound/experiments.h"

namespace {

std::string TimestampLine() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf + "\n";
}

int ReportError(const std::string& kind, const std::string& message,
                const std::string& field = "") {
  nlohmann::json record = {{"status", "error"}, {"kind", kind}, {"message", message}};
  if (!field.empty()) record["field"] = field;
  std::cerr << record.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy iterative training with information-theoretic generalization bounds"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::vector<uint64_t> seeds;
  bool no_timestamp = false;
  for (const char* name : {"divergence", "train", "fed", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Config file");
    sub->add_option("--out", out_path, "Output CSV path (stdout when empty)");
    sub->add_option("--seeds", seeds, "Seed list overriding run.seeds")->delimiter(',');
    sub->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp header line");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what());
  }

  try {
    noisybound::RunConfig config;
    if (!config_path.empty()) config = noisybound::LoadConfig(config_path);
    config.experiment = app.get_subcommands().front()->get_name();
    if (!seeds.empty()) config.run.seeds = seeds;
    if (no_timestamp) config.run.timestamp = false;
    std::string csv = noisybound::RunExperimentCsv(config);
    if (config.run.timestamp) csv = TimestampLine() + csv;
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      out << csv;
      if (!out) return ReportError("io", "cannot write " + out_path);
    }
  } catch (const noisybound::ConfigError& e) {
    return ReportError("config", e.what(), e.field());
  } catch (const std::exception& e) {
    return ReportError("runtime", e.what());
  }
  return 0;
}
