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

// Dense density-matrix engine.
//
// Every state is a 2^n x 2^n complex matrix; qubit 0 is the most significant
// bit of the basis index, so |q0 q1 ... q_{n-1}> has index sum q_k 2^(n-1-k).
// All functions are pure: they take values and return new values.

#pragma once

#include <optional>
#include <vector>

#include "qecapprox/types.hpp"

namespace qecapprox {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Eigen::Vector3d vec() const { return {x, y, z}; }
  static BlochVector from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

class DensityMatrix {
 public:
  DensityMatrix() = default;

  /// Validates hermiticity and unit trace. PSD is checked separately (see
  /// check_positive) because it needs an eigendecomposition.
  explicit DensityMatrix(Matrix data);

  /// No validation; for kernels whose outputs are valid by construction.
  static DensityMatrix unchecked(Matrix data);

  int n_qubits() const { return n_qubits_; }
  Index dim() const { return data_.rows(); }
  const Matrix& matrix() const { return data_; }

  double trace() const { return data_.trace().real(); }
  double purity() const;

  /// Throws InvalidInput when the minimum eigenvalue is below -tol.
  void check_positive(double tol = 1e-9) const;

 private:
  int n_qubits_ = 0;
  Matrix data_;
};

/// Ordered Kraus operators on n qubits; completeness is enforced on
/// construction (||sum K^dagger K - I||_max < 1e-10).
class KrausChannel {
 public:
  KrausChannel() = default;
  explicit KrausChannel(std::vector<Matrix> operators, double tol = 1e-10);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Matrix>& operators() const { return operators_; }

  double completeness_error() const;

  /// Liouville form sum_k K (x) conj(K) on the row-major vectorisation.
  const Matrix& superoperator() const { return superop_; }

  static KrausChannel identity(int n_qubits = 1);

 private:
  int n_qubits_ = 0;
  std::vector<Matrix> operators_;
  Matrix superop_;
};

double completeness_error(const std::vector<Matrix>& operators);

DensityMatrix pure_state(const BlochVector& b);

/// Normalised amplitudes (alpha, beta) with |psi><psi| = (I + r.sigma)/2.
std::pair<Complex, Complex> bloch_amplitudes(const BlochVector& b);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& qubits);

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            const std::vector<int>& qubits);

/// The same one-qubit channel on every qubit of the register.
DensityMatrix apply_transversal(const DensityMatrix& rho, const KrausChannel& ch);

/// Reduced state on `keep`, in the order listed.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

struct MeasurementBranch {
  double probability = 0.0;
  /// Empty for zero-probability branches (p < 1e-14).
  std::optional<DensityMatrix> state;
};

std::vector<MeasurementBranch> measure_and_project(const DensityMatrix& rho,
                                                   const std::vector<Matrix>& projectors);

/// (1/2) Tr|rho - sigma| from the spectrum of the Hermitian difference.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// sqrt(<psi|rho|psi>) for a pure psi.
double fidelity_pure(const DensityMatrix& psi, const DensityMatrix& rho);

Matrix bloch_to_matrix(const BlochVector& b);

}  // namespace qecapprox
