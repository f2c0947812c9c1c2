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

#include "qecapprox/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "qecapprox/sphere.hpp"
#include "qecapprox/steane.hpp"

namespace qecapprox {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Physical: return "physical";
    case Level::LogicalUncorrected: return "uncorrected";
    case Level::LogicalPerfectEC: return "perfect";
    case Level::LogicalFaultyEC: return "faulty";
  }
  return "?";
}

Level level_from_string(std::string_view s) {
  for (Level l : {Level::Physical, Level::LogicalUncorrected, Level::LogicalPerfectEC, Level::LogicalFaultyEC})
    if (s == to_string(l)) return l;
  throw InvalidInput("unknown level '" + std::string(s) + "'");
}

std::string_view to_string(EcMode mode) { return mode == EcMode::Perfect ? "perfect" : "faulty"; }

EcMode ec_mode_from_string(std::string_view s) {
  if (s == "perfect") return EcMode::Perfect;
  if (s == "faulty") return EcMode::Faulty;
  throw InvalidInput("unknown EC mode '" + std::string(s) + "'");
}

std::vector<BlochVector> sample_bloch_states(int n) {
  if (n < 1) throw InvalidInput("need at least one state");
  std::vector<BlochVector> out;
  for (const auto& p : fibonacci_sphere(n)) out.push_back(BlochVector::from(p));
  return out;
}

std::vector<BlochVector> sample_bloch_states_random(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("need at least one state");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<BlochVector> out;
  while (static_cast<int>(out.size()) < n) {
    Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    if (v.norm() < 1e-9) continue;
    out.push_back(BlochVector::from(v.normalized()));
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo)) throw InvalidInput("log grid needs 0 < min < max");
  if (points < 2) throw InvalidInput("log grid needs at least 2 points");
  std::vector<double> g(points);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) g[i] = std::exp(a + (b - a) * i / (points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

// Restriction to span{|0_L>, |1_L>}; exact for states in the codespace.
DensityMatrix logical_block(const DensityMatrix& rho) {
  const SteaneCode& code = SteaneCode::get();
  Matrix v(rho.dim(), 2);
  v.col(0) = code.logical_zero();
  v.col(1) = code.logical_one();
  return DensityMatrix::unchecked(v.adjoint() * rho.matrix() * v);
}

bool in_codespace(Level level) {
  return level == Level::LogicalPerfectEC || level == Level::LogicalFaultyEC;
}

double level_distance(Level level, const DensityMatrix& a, const DensityMatrix& b) {
  if (in_codespace(level)) return trace_distance(logical_block(a), logical_block(b));
  return trace_distance(a, b);
}

DensityMatrix initial_state(Level level, const BlochVector& b) {
  return level == Level::Physical ? pure_state(b) : encode(b);
}

DensityMatrix run_level(Level level, const KrausChannel& ch, const DensityMatrix& in) {
  switch (level) {
    case Level::Physical:
      return apply_channel(in, ch, {0});
    case Level::LogicalUncorrected:
      return apply_transversal(in, ch);
    case Level::LogicalPerfectEC:
      return perfect_ec(apply_transversal(in, ch));
    case Level::LogicalFaultyEC:
      return perfect_ec(faulty_ec(apply_transversal(in, ch), ch));
  }
  return in;
}

double population_std(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return v.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(v.size()));
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

LevelOutcome evaluate_level(Level level, const KrausChannel& channel, const BlochVector& state) {
  if (channel.n_qubits() != 1) throw DimensionMismatch("level evaluation needs a one-qubit channel");
  const DensityMatrix in = initial_state(level, state);
  DensityMatrix out = run_level(level, channel, in);
  const double d = level_distance(level, in, out);
  return {d, std::move(out)};
}

double accuracy_at_level(Level level, const KrausChannel& target, const KrausChannel& approx,
                         const BlochVector& state) {
  const LevelOutcome a = evaluate_level(level, target, state);
  const LevelOutcome b = evaluate_level(level, approx, state);
  return level_distance(level, a.final_state, b.final_state);
}

double accuracy_at_level(Level level, const KrausChannel& target, const ChannelModel& approx,
                         const BlochVector& state) {
  return accuracy_at_level(level, target, model_to_kraus(approx), state);
}

ChannelFamily tabulate(const ChannelFamily& f, const std::vector<double>& grid, int jobs) {
  auto table = std::make_shared<std::vector<std::pair<double, KrausChannel>>>(grid.size());
  parallel_for(static_cast<int>(grid.size()), jobs, [&](int i) { (*table)[i] = {grid[i], f.at(grid[i])}; });
  auto fallback = f.at;
  return {f.id, [table, fallback](double eps) {
            for (const auto& [e, ch] : *table)
              if (e == eps) return ch;
            return fallback(eps);
          }};
}

std::vector<SweepResult> sweep_level(Level level, const ChannelFamily& target,
                                     const std::vector<ChannelFamily>& approx,
                                     const std::vector<BlochVector>& states,
                                     const std::vector<double>& grid, int jobs) {
  if (states.empty()) throw InvalidInput("sweep needs at least one state");
  if (grid.empty()) throw InvalidInput("sweep needs a non-empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("sweep grid must be strictly increasing");

  const Index ns = static_cast<Index>(states.size()), ng = static_cast<Index>(grid.size());
  std::vector<SweepResult> out(approx.size() + 1);
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].channel_id = c == 0 ? target.id : approx[c - 1].id;
    out[c].level = level;
    out[c].grid = grid;
    out[c].honesty = Eigen::MatrixXd::Zero(ns, ng);
    out[c].accuracy = Eigen::MatrixXd::Zero(ns, ng);
  }

  // Channels are built once per grid point and shared read-only by workers.
  const std::size_t nc = approx.size() + 1;
  std::vector<std::vector<KrausChannel>> channels(ng, std::vector<KrausChannel>(nc));
  parallel_for(static_cast<int>(ng * nc), jobs, [&](int task) {
    const Index g = task / static_cast<Index>(nc);
    const std::size_t c = task % nc;
    channels[g][c] = c == 0 ? target.at(grid[g]) : approx[c - 1].at(grid[g]);
  });

  parallel_for(static_cast<int>(ns * ng), jobs, [&](int task) {
    const Index s = task / ng, g = task % ng;
    const DensityMatrix in = initial_state(level, states[s]);
    const DensityMatrix ref = run_level(level, channels[g][0], in);
    out[0].honesty(s, g) = level_distance(level, in, ref);
    for (std::size_t c = 1; c < out.size(); ++c) {
      const DensityMatrix res = run_level(level, channels[g][c], in);
      out[c].honesty(s, g) = level_distance(level, in, res);
      out[c].accuracy(s, g) = level_distance(level, ref, res);
    }
  });

  for (auto& r : out) {
    r.mean_honesty = r.honesty.colwise().mean();
    r.mean_accuracy = r.accuracy.colwise().mean();
    r.std_honesty = ((r.honesty.rowwise() - r.mean_honesty.transpose()).array().square().colwise().mean()).sqrt();
    r.std_accuracy =
        ((r.accuracy.rowwise() - r.mean_accuracy.transpose()).array().square().colwise().mean()).sqrt();
  }
  return out;
}

CoefficientFit leading_coefficient(const std::vector<double>& grid, const std::vector<double>& values,
                                   int order) {
  if (order != 1 && order != 2) throw InvalidInput("leading_coefficient order must be 1 or 2");
  if (grid.size() != values.size()) throw DimensionMismatch("grid and values differ in length");
  if (grid.size() < 5) throw InvalidInput("leading_coefficient needs at least 5 points");

  std::vector<std::size_t> order_idx(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) order_idx[i] = i;
  std::sort(order_idx.begin(), order_idx.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });

  std::vector<std::size_t> window;
  bool any_positive = false;
  for (std::size_t i : order_idx) {
    if (values[i] > 1e-12) {
      any_positive = true;
      if (window.size() < 5) window.push_back(i);
    }
  }
  if (!any_positive) return {0.0, 0.0, true};
  if (window.size() < 5) return {0.0, 1.0, false};

  // Columns scaled by the largest grid value for conditioning.
  const double scale = grid[window.back()];
  Eigen::MatrixXd a(5, 2);
  Eigen::VectorXd y(5);
  for (int r = 0; r < 5; ++r) {
    const double e = grid[window[r]] / scale;
    a(r, 0) = std::pow(e, order);
    a(r, 1) = std::pow(e, order + 1);
    y(r) = values[window[r]];
  }
  const Eigen::Vector2d x = a.colPivHouseholderQr().solve(y);
  CoefficientFit fit;
  fit.coefficient = x(0) / std::pow(scale, order);
  fit.residual = (a * x - y).norm() / y.norm();
  fit.accepted = fit.residual <= 0.05;
  return fit;
}

CoefficientSummary summarize_coefficients(const std::vector<double>& grid, const Eigen::MatrixXd& values,
                                          int order) {
  CoefficientSummary s;
  std::vector<double> kept;
  for (Index r = 0; r < values.rows(); ++r) {
    const Eigen::VectorXd row = values.row(r).transpose();
    const CoefficientFit fit = leading_coefficient(grid, std::vector<double>(row.data(), row.data() + row.size()), order);
    if (fit.accepted) {
      kept.push_back(fit.coefficient);
      s.per_state.push_back(fit.coefficient);
      ++s.accepted;
    } else {
      s.per_state.push_back(std::numeric_limits<double>::quiet_NaN());
      ++s.rejected;
    }
  }
  s.mean = mean_of(kept);
  s.std = population_std(kept, s.mean);
  return s;
}

std::optional<double> pseudothreshold(const ChannelFamily& physical, const ChannelFamily& logical,
                                      EcMode mode, const BlochVector& state,
                                      const std::vector<double>& grid) {
  if (grid.size() < 10) throw InvalidInput("pseudothreshold grid needs at least 10 points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1] && grid[i - 1] > 0.0)) throw InvalidInput("pseudothreshold grid must be positive and increasing");

  const DensityMatrix phys_in = pure_state(state);
  const DensityMatrix log_in = encode(state);
  auto gap = [&](double eps) {
    const double f_phys = fidelity_pure(phys_in, apply_channel(phys_in, physical.at(eps), {0}));
    const KrausChannel noise = logical.at(eps);
    DensityMatrix noisy = apply_transversal(log_in, noise);
    if (mode == EcMode::Faulty) noisy = faulty_ec(noisy, noise);
    return ec_fidelity(log_in, noisy) - f_phys;
  };

  // Differences at rounding level carry no sign information.
  constexpr double kFloor = 1e-13;
  std::optional<std::pair<double, double>> last;  // (log eps, gap)
  for (double eps : grid) {
    const double d = gap(eps);
    if (std::abs(d) <= kFloor) continue;
    if (last && (last->second > 0.0) != (d > 0.0)) {
      const double t = last->second / (last->second - d);
      return std::exp(last->first + t * (std::log(eps) - last->first));
    }
    last = {std::log(eps), d};
  }
  return std::nullopt;
}

ThresholdRecord threshold_summary(const std::string& channel_id,
                                  const std::vector<std::optional<double>>& target,
                                  const std::vector<std::optional<double>>& approx) {
  if (target.size() != approx.size()) throw DimensionMismatch("threshold lists differ in length");
  ThresholdRecord rec;
  rec.channel_id = channel_id;
  rec.per_state = approx;
  std::vector<double> present;
  double sq = 0.0;
  int paired = 0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    if (!approx[i]) {
      ++rec.missing;
      continue;
    }
    present.push_back(*approx[i]);
    if (target[i]) {
      sq += (*approx[i] - *target[i]) * (*approx[i] - *target[i]);
      ++paired;
    }
  }
  rec.mean = mean_of(present);
  rec.std = population_std(present, rec.mean);
  rec.rms_vs_target = paired ? std::sqrt(sq / paired) : 0.0;
  return rec;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qecapprox
