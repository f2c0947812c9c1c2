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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qecapprox/channels.hpp"

namespace qecapprox {

enum class Level { Physical, LogicalUncorrected, LogicalPerfectEC, LogicalFaultyEC };

std::string_view to_string(Level level);  // physical, uncorrected, perfect, faulty
Level level_from_string(std::string_view s);

enum class EcMode { Perfect, Faulty };

std::string_view to_string(EcMode mode);  // perfect, faulty
EcMode ec_mode_from_string(std::string_view s);

/// Fibonacci lattice on the unit sphere; deterministic.
std::vector<BlochVector> sample_bloch_states(int n);

/// Uniform random pure states from a seeded generator.
std::vector<BlochVector> sample_bloch_states_random(int n, std::uint64_t seed);

/// Log-spaced grid with `points` entries from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

struct LevelOutcome {
  double d_honesty = 0.0;
  DensityMatrix final_state;
};

/// Runs the state through the level's pipeline. At the faulty level the
/// channel is also the gate noise inside syndrome extraction.
LevelOutcome evaluate_level(Level level, const KrausChannel& channel, const BlochVector& state);

double accuracy_at_level(Level level, const KrausChannel& target, const KrausChannel& approx,
                         const BlochVector& state);
double accuracy_at_level(Level level, const KrausChannel& target, const ChannelModel& approx,
                         const BlochVector& state);

/// Noise strength -> channel.
struct ChannelFamily {
  std::string id;
  std::function<KrausChannel(double)> at;
};

/// Evaluates `f` on every grid point up front (in parallel); later calls at
/// those exact strengths are lookups, anything else falls through to `f`.
ChannelFamily tabulate(const ChannelFamily& f, const std::vector<double>& grid, int jobs = 1);

struct SweepResult {
  std::string channel_id;
  Level level = Level::Physical;
  std::vector<double> grid;
  Eigen::MatrixXd honesty;   // state x grid
  Eigen::MatrixXd accuracy;  // state x grid, distance to the target's output
  Eigen::VectorXd mean_honesty, std_honesty, mean_accuracy, std_accuracy;
};

/// Entry 0 is the target itself (zero accuracy); the rest follow `approx`.
std::vector<SweepResult> sweep_level(Level level, const ChannelFamily& target,
                                     const std::vector<ChannelFamily>& approx,
                                     const std::vector<BlochVector>& states,
                                     const std::vector<double>& grid, int jobs = 1);

struct CoefficientFit {
  double coefficient = 0.0;
  double residual = 0.0;  // ||A x - y|| / ||y||
  bool accepted = true;
};

/// Least squares on the 5 smallest grid points with value > 1e-12.
/// Order 1 fits a1 e + a2 e^2 and reports a1; order 2 fits a2 e^2 + a3 e^3
/// and reports a2. An all-zero series has coefficient 0.
CoefficientFit leading_coefficient(const std::vector<double>& grid, const std::vector<double>& values,
                                   int order);

struct CoefficientSummary {
  double mean = 0.0;
  double std = 0.0;  // population
  int accepted = 0;
  int rejected = 0;
  std::vector<double> per_state;  // NaN where rejected
};

/// Per-state fits of one sweep matrix (rows = states).
CoefficientSummary summarize_coefficients(const std::vector<double>& grid, const Eigen::MatrixXd& values,
                                          int order);

/// First crossing of the logical and physical fidelity curves, linearly
/// interpolated in log strength; nullopt when the curves do not cross.
std::optional<double> pseudothreshold(const ChannelFamily& physical, const ChannelFamily& logical,
                                      EcMode mode, const BlochVector& state,
                                      const std::vector<double>& grid);

struct ThresholdRecord {
  std::string channel_id;
  std::vector<std::optional<double>> per_state;
  double mean = 0.0;
  double std = 0.0;
  double rms_vs_target = 0.0;
  int missing = 0;
};

/// Mean and population std over the states with a crossing; RMS over the
/// states where both lists have one.
ThresholdRecord threshold_summary(const std::string& channel_id,
                                  const std::vector<std::optional<double>>& target,
                                  const std::vector<std::optional<double>>& approx);

/// Runs fn(0..n-1) on up to `jobs` threads; jobs <= 0 means hardware
/// concurrency.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace qecapprox
