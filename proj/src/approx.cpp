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

#include "qecapprox/approx.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qecapprox/sphere.hpp"

namespace qecapprox {

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::None: return "none";
    case Constraint::AverageFidelity: return "a";
    case Constraint::WorstTraceDistance: return "w";
  }
  return "?";
}

Constraint constraint_from_string(std::string_view s) {
  if (s == "none") return Constraint::None;
  if (s == "a") return Constraint::AverageFidelity;
  if (s == "w") return Constraint::WorstTraceDistance;
  throw InvalidInput("unknown constraint '" + std::string(s) + "'");
}

std::string_view to_string(FitStatus s) { return s == FitStatus::Optimal ? "optimal" : "infeasible"; }

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += u[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

ChannelModel pauli_twirl(const KrausChannel& target) {
  const ProcessMatrix pm = process_matrix(target);
  Eigen::VectorXd probs(4);
  for (int k = 0; k < 4; ++k) probs(k) = std::max(0.0, pm.chi(k, k).real());
  probs /= probs.sum();
  return make_model(SetKind::PC, probs);
}

namespace {

Matrix4 model_chi(const ChannelModel& m) {
  Matrix4 chi = Matrix4::Zero();
  for (std::size_t i = 0; i < m.set.size(); ++i)
    chi += m.probs(static_cast<Index>(i)) * process_matrix(m.set.elements()[i].kraus).chi;
  return chi;
}

double half_distance(const BlochAffineMap& map, const Eigen::Vector3d& r) {
  return 0.5 * (map.apply(r) - r).norm();
}

// One fit variable: a single element, or the tied X/Y/Z triple for DC.
struct Basis {
  Matrix4 chi;
  Eigen::Matrix3d shift;  // M - I
  Eigen::Vector3d offset;
  double fidelity;        // F_av(I, element) = chi_II
};

class Problem {
 public:
  Problem(const KrausChannel& target, const OperationSet& set, Constraint constraint, double margin)
      : constraint_(constraint), margin_(margin) {
    target_chi_ = process_matrix(target).chi;
    target_map_ = bloch_affine_map(target);
    target_fidelity_ = average_fidelity_to_identity(target);

    const auto& elems = set.elements();
    std::vector<Basis> per_element;
    for (const auto& e : elems) {
      const BlochAffineMap map = bloch_affine_map(e.kraus);
      const Matrix4 chi = process_matrix(e.kraus).chi;
      per_element.push_back({chi, map.m - Eigen::Matrix3d::Identity(), map.c, chi(0, 0).real()});
    }
    if (set.tied_paulis()) {
      expand_ = Eigen::MatrixXd::Zero(4, 2);
      expand_(0, 0) = 1.0;
      expand_.block(1, 1, 3, 1).setConstant(1.0 / 3.0);
      Basis tied{Matrix4::Zero(), Eigen::Matrix3d::Zero(), Eigen::Vector3d::Zero(), 0.0};
      for (int k = 1; k < 4; ++k) {
        tied.chi += per_element[k].chi / 3.0;
        tied.shift += per_element[k].shift / 3.0;
        tied.offset += per_element[k].offset / 3.0;
        tied.fidelity += per_element[k].fidelity / 3.0;
      }
      basis_ = {per_element[0], tied};
    } else {
      expand_ = Eigen::MatrixXd::Identity(static_cast<Index>(elems.size()), static_cast<Index>(elems.size()));
      basis_ = per_element;
    }

    const Index n = static_cast<Index>(basis_.size());
    gram_.resize(n, n);
    linear_.resize(n);
    for (Index i = 0; i < n; ++i) {
      linear_(i) = (target_chi_.adjoint() * basis_[i].chi).trace().real();
      for (Index j = 0; j < n; ++j) gram_(i, j) = (basis_[i].chi.adjoint() * basis_[j].chi).trace().real();
    }
    constant_ = target_chi_.squaredNorm();
    scale_ = (target_chi_ - process_matrix(std::vector<Matrix2>{pauli::I()}).chi).norm();
    if (scale_ < 1e-14) scale_ = 1.0;
  }

  Index size() const { return static_cast<Index>(basis_.size()); }
  const BlochAffineMap& target_map() const { return target_map_; }
  double target_fidelity() const { return target_fidelity_; }
  const Eigen::MatrixXd& expand() const { return expand_; }

  void set_penalty(double mu) { mu_ = mu; }

  void add_directions(const std::vector<Eigen::Vector3d>& dirs) {
    for (const auto& r : dirs) {
      directions_.push_back(r);
      required_.push_back((1.0 + margin_) * (target_map_.apply(r) - r).squaredNorm());
    }
  }

  BlochAffineMap model_map(const Eigen::VectorXd& q) const {
    BlochAffineMap map;
    map.m = Eigen::Matrix3d::Identity();
    map.c.setZero();
    for (Index j = 0; j < size(); ++j) {
      map.m += q(j) * basis_[j].shift;
      map.c += q(j) * basis_[j].offset;
    }
    return map;
  }

  double model_fidelity(const Eigen::VectorXd& q) const {
    double f = 0.0;
    for (Index j = 0; j < size(); ++j) f += q(j) * basis_[j].fidelity;
    return f;
  }

  double objective(const Eigen::VectorXd& q) const {
    return (q.dot(gram_ * q) - 2.0 * linear_.dot(q) + constant_) / (scale_ * scale_);
  }

  // Penalised value; fills `grad` when non-null.
  double eval(const Eigen::VectorXd& q, Eigen::VectorXd* grad) const {
    const double s2 = scale_ * scale_;
    double value = objective(q);
    if (grad) *grad = 2.0 * (gram_ * q - linear_) / s2;

    if (constraint_ == Constraint::AverageFidelity) {
      const double g = (model_fidelity(q) - target_fidelity_) / scale_;
      if (g > 0.0) {
        value += mu_ * g * g;
        if (grad)
          for (Index j = 0; j < size(); ++j) (*grad)(j) += 2.0 * mu_ * g * basis_[j].fidelity / scale_;
      }
    } else if (constraint_ == Constraint::WorstTraceDistance) {
      Eigen::Matrix3d shift = Eigen::Matrix3d::Zero();
      Eigen::Vector3d offset = Eigen::Vector3d::Zero();
      for (Index j = 0; j < size(); ++j) {
        shift += q(j) * basis_[j].shift;
        offset += q(j) * basis_[j].offset;
      }
      Eigen::Matrix3d w_outer = Eigen::Matrix3d::Zero();
      Eigen::Vector3d w_sum = Eigen::Vector3d::Zero();
      for (std::size_t k = 0; k < directions_.size(); ++k) {
        const Eigen::Vector3d& r = directions_[k];
        const Eigen::Vector3d u = shift * r + offset;
        const double g = (required_[k] - u.squaredNorm()) / s2;
        if (g <= 0.0) continue;
        value += mu_ * g * g;
        if (grad) {
          const double w = -4.0 * mu_ * g / s2;
          w_outer.noalias() += w * u * r.transpose();
          w_sum += w * u;
        }
      }
      if (grad)
        for (Index j = 0; j < size(); ++j)
          (*grad)(j) += (basis_[j].shift.array() * w_outer.array()).sum() + basis_[j].offset.dot(w_sum);
    }
    return value;
  }

  // Largest relative shortfall of the margin-inflated honesty condition.
  double margin_shortfall(const Eigen::VectorXd& q, std::vector<Eigen::Vector3d>& worst,
                          int lattice, int candidates) const {
    const BlochAffineMap model = model_map(q);
    const double half_margin = 1.0 + 0.5 * margin_;
    auto shortfall = [&](const Eigen::Vector3d& r) {
      return (half_margin * (target_map_.apply(r) - r).squaredNorm() - (model.apply(r) - r).squaredNorm()) /
             (scale_ * scale_);
    };
    const auto maxima = local_maxima_on_sphere(shortfall, lattice, candidates);
    worst.clear();
    for (const auto& m : maxima)
      if (m.value > 0.0) worst.push_back(m.direction);
    return maxima.front().value;
  }

 private:
  Constraint constraint_;
  double margin_;
  Matrix4 target_chi_;
  BlochAffineMap target_map_;
  double target_fidelity_ = 1.0;
  Eigen::MatrixXd expand_;
  std::vector<Basis> basis_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd linear_;
  double constant_ = 0.0;
  double scale_ = 1.0;
  double mu_ = 0.0;
  std::vector<Eigen::Vector3d> directions_;
  std::vector<double> required_;
};

// FISTA with backtracking and function-value restart. Convergence is only
// declared on a step taken without momentum.
Eigen::VectorXd minimize(const Problem& problem, Eigen::VectorXd q, const FitOptions& opt, int& iterations) {
  Eigen::VectorXd y = q, grad(q.size());
  double fq = problem.eval(q, nullptr);
  double t = 1.0, lipschitz = 1.0;
  bool plain = true;
  for (int it = 0; it < opt.max_iterations; ++it) {
    ++iterations;
    const double fy = problem.eval(y, &grad);
    Eigen::VectorXd qn;
    double fqn = 0.0;
    for (;;) {
      qn = project_to_simplex(y - grad / lipschitz);
      fqn = problem.eval(qn, nullptr);
      const Eigen::VectorXd d = qn - y;
      if (fqn <= fy + grad.dot(d) + 0.5 * lipschitz * d.squaredNorm() + 1e-14 * std::abs(fy)) break;
      lipschitz *= 2.0;
      if (lipschitz > 1e30) break;
    }
    const double change = fq - fqn;
    const bool stalled = change < opt.tolerance * std::max(1.0, std::abs(fq));
    if (plain && stalled) {
      if (change > 0.0) q = std::move(qn);
      break;
    }
    if (change < 0.0 || stalled) {
      // Momentum overshoot or a stall under momentum: restart from q.
      y = q;
      t = 1.0;
      plain = true;
      continue;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = qn + ((t - 1.0) / tn) * (qn - q);
    plain = (t - 1.0) / tn == 0.0;
    q = std::move(qn);
    fq = fqn;
    t = tn;
    lipschitz *= 0.9;
  }
  return q;
}

}  // namespace

double hs_objective(const KrausChannel& target, const ChannelModel& model) {
  model.validate();
  return (process_matrix(target).chi - model_chi(model)).norm();
}

double worst_case_distance(const KrausChannel& ch) {
  const BlochAffineMap map = bloch_affine_map(ch);
  return maximize_on_sphere([&](const Eigen::Vector3d& r) { return half_distance(map, r); }, 2000, 8).value;
}

double honesty_violation(const BlochAffineMap& target, const BlochAffineMap& model, int lattice, int candidates) {
  auto gap = [&](const Eigen::Vector3d& r) { return half_distance(target, r) - half_distance(model, r); };
  return maximize_on_sphere(gap, lattice, candidates).value;
}

FitResult fit_model(const KrausChannel& target, SetKind set_kind, Constraint constraint, const FitOptions& opt) {
  if (target.n_qubits() != 1) throw DimensionMismatch("fit_model needs a one-qubit target");
  const OperationSet set = OperationSet::make(set_kind);
  const double margin = constraint == Constraint::WorstTraceDistance ? opt.honesty_margin : 0.0;
  Problem problem(target, set, constraint, margin);

  FitResult result{ChannelModel{set, Eigen::VectorXd()}, constraint};
  Eigen::VectorXd q = Eigen::VectorXd::Constant(problem.size(), 1.0 / static_cast<double>(problem.size()));

  if (constraint == Constraint::None) {
    q = minimize(problem, q, opt, result.iterations);
  } else {
    if (constraint == Constraint::WorstTraceDistance) problem.add_directions(fibonacci_sphere(opt.fit_directions));
    double mu = opt.initial_penalty;
    for (int stage = 0; stage < opt.penalty_stages; ++stage, mu *= opt.penalty_growth) {
      problem.set_penalty(mu);
      q = minimize(problem, q, opt, result.iterations);
    }
    if (constraint == Constraint::WorstTraceDistance) {
      std::vector<Eigen::Vector3d> worst;
      for (int round = 0; round < opt.exchange_rounds; ++round) {
        if (problem.margin_shortfall(q, worst, opt.verify_directions, opt.verify_candidates) <= 0.0) break;
        problem.add_directions(worst);
        q = minimize(problem, q, opt, result.iterations);
      }
    }
  }

  Eigen::VectorXd probs = problem.expand() * q;
  probs = probs.cwiseMax(0.0);
  probs /= probs.sum();
  if (set.tied_paulis()) probs.tail(3).setConstant((1.0 - probs(0)) / 3.0);
  result.model.probs = probs;
  result.model.validate();
  result.objective = hs_objective(target, result.model);

  switch (constraint) {
    case Constraint::None:
      result.max_violation = 0.0;
      break;
    case Constraint::AverageFidelity:
      result.max_violation =
          std::max(0.0, average_fidelity_to_identity(model_to_kraus(result.model)) - problem.target_fidelity());
      break;
    case Constraint::WorstTraceDistance:
      result.max_violation = std::max(0.0, honesty_violation(problem.target_map(), bloch_affine_map(model_to_kraus(result.model)),
                                                             opt.verify_directions, opt.verify_candidates));
      break;
  }
  result.constraint_satisfied = result.max_violation <= opt.feasibility_tolerance;
  result.status = result.constraint_satisfied ? FitStatus::Optimal : FitStatus::Infeasible;
  return result;
}

}  // namespace qecapprox
