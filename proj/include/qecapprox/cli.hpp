// Copyright 2026 The qecapprox Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qecapprox/approx.hpp"
#include "qecapprox/metrics.hpp"
#include "qecapprox/serialize.hpp"

namespace qecapprox::cli {

enum class Command { Approximate, Sweep, Threshold, Tables };

std::string_view to_string(Command c);

enum class TargetKind { ADC, Pol };

struct TargetSpec {
  TargetKind kind = TargetKind::ADC;
  double phi = 0.39269908169872414;  // pi/8, only used by pol

  std::string id() const;  // "adc" or "pol"
  KrausChannel at(double strength) const;
  ChannelFamily family() const;
};

/// "<set>_<constraint>" with set in {pc, cc, pmc, cmc, dc} and constraint in
/// {a, w, none}; bare "dc" means dc_a.
struct ModelSpec {
  SetKind set = SetKind::PC;
  Constraint constraint = Constraint::AverageFidelity;

  static ModelSpec parse(std::string_view name);
  std::string id() const;
};

/// Fitted model at each strength, as a channel family named after the model.
ChannelFamily model_family(const TargetSpec& target, const ModelSpec& model);

struct GridSpec {
  double min = 1e-4;
  double max = 1e-2;
  int points = 8;
  bool log = true;

  /// A single point sits at `min` and needs min == max.
  std::vector<double> values() const;
};

struct ExperimentConfig {
  TargetSpec target;
  std::vector<ModelSpec> models;
  std::vector<Level> levels;
  int n_states = 80;
  GridSpec grid;
  EcMode ec_mode = EcMode::Perfect;
  std::vector<ModelSpec> hybrid_logical;  // threshold: target physical, model logical
  std::filesystem::path output_dir = "out";
  std::optional<std::uint64_t> seed;  // random states instead of the Fibonacci lattice
  int jobs = 0;                       // <= 0: hardware concurrency

  std::vector<BlochVector> states() const;
};

/// Defaults for a command. The threshold grid depends on the EC mode.
Json default_config_json(Command command, EcMode ec_mode);

Json config_to_json(const ExperimentConfig& c);

/// Throws InvalidInput on unknown keys or malformed values.
ExperimentConfig config_from_json(const Json& j);

/// Command-specific checks; throws InvalidInput.
void validate(const ExperimentConfig& c, Command command);

/// Hex FNV-1a of the canonical JSON, ignoring jobs and output_dir.
std::string config_hash(const ExperimentConfig& c);

/// Each returns the process exit code; progress and warnings go to `log`.
int cmd_approximate(const ExperimentConfig& c, std::ostream& log);
int cmd_sweep(const ExperimentConfig& c, std::ostream& log);
int cmd_threshold(const ExperimentConfig& c, std::ostream& log);
int cmd_tables(const std::filesystem::path& dir, std::ostream& out);

/// Full command line, including argv[0]. 0 ok, 1 runtime failure, 2 usage.
int run_cli(int argc, const char* const* argv);

}  // namespace qecapprox::cli
