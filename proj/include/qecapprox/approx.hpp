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

// Fitting stabilizer channel models to a one-qubit target.
//
// The objective is the Frobenius distance between Pauli-basis process
// matrices, which is a convex quadratic in the model probabilities. Two
// honesty-motivated constraints are supported:
//
//   AverageFidelity     F_av(I, model) <= F_av(I, target)           (linear)
//   WorstTraceDistance  D(rho, model(rho)) >= D(rho, target(rho))
//                       for every pure rho                          (semi-infinite)
//
// The optimiser is accelerated projected gradient on the probability
// simplex with an exterior quadratic penalty ramped over stages. The
// semi-infinite constraint is sampled on a Fibonacci direction set that is
// enlarged with the worst violators found by a dense verification scan.

#pragma once

#include <string_view>

#include "qecapprox/channels.hpp"

namespace qecapprox {

enum class Constraint { None, AverageFidelity, WorstTraceDistance };

std::string_view to_string(Constraint c);  // "none", "a", "w"
Constraint constraint_from_string(std::string_view s);

enum class FitStatus { Optimal, Infeasible };

std::string_view to_string(FitStatus s);

struct FitResult {
  ChannelModel model;
  Constraint constraint = Constraint::None;
  FitStatus status = FitStatus::Optimal;
  /// Hilbert-Schmidt (chi Frobenius) distance to the target at the optimum.
  double objective = 0.0;
  bool constraint_satisfied = true;
  double max_violation = 0.0;
  int iterations = 0;
};

struct FitOptions {
  int fit_directions = 1000;
  int verify_directions = 10000;
  int verify_candidates = 8;
  int penalty_stages = 10;
  double initial_penalty = 1.0;
  double penalty_growth = 10.0;
  int max_iterations = 100000;
  double tolerance = 1e-12;
  int exchange_rounds = 12;
  /// Relative slack on squared distances, so the exterior penalty optimum
  /// stays on the honest side.
  double honesty_margin = 1e-6;
  double feasibility_tolerance = 1e-8;
};

/// PC model whose probabilities are the diagonal of the target's chi matrix.
ChannelModel pauli_twirl(const KrausChannel& target);

/// ||chi_target - chi_model||_F.
double hs_objective(const KrausChannel& target, const ChannelModel& model);

/// max over pure states of D(rho, ch(rho)) = max_r |(M - I) r + c| / 2.
double worst_case_distance(const KrausChannel& ch);

/// max over pure states of D(rho, target(rho)) - D(rho, model(rho)); positive
/// values mean the model underestimates the error on some state.
double honesty_violation(const BlochAffineMap& target, const BlochAffineMap& model,
                         int lattice = 10000, int candidates = 8);

FitResult fit_model(const KrausChannel& target, SetKind set, Constraint constraint,
                    const FitOptions& options = {});

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

}  // namespace qecapprox
