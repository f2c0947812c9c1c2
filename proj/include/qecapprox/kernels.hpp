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

// Index-permuted kernels acting on a few qubits of a dense 2^n x 2^n
// operator. None of these ever materialises an embedded 2^n x 2^n gate.
//
// Qubit 0 is the most significant bit of the computational-basis index.

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "qecapprox/types.hpp"

namespace qecapprox::kernels {

inline Index qubit_mask(int n_qubits, int qubit) {
  return Index{1} << (n_qubits - 1 - qubit);
}

inline int parity(std::uint64_t v) { return std::popcount(v) & 1; }

/// Kronecker product, left factor on the more significant index bits.
template <typename A, typename B>
ComplexMatrixT<typename A::RealScalar> kron(const Eigen::MatrixBase<A>& a,
                                            const Eigen::MatrixBase<B>& b) {
  ComplexMatrixT<typename A::RealScalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Liouville superoperator sum_k K (x) conj(K), acting on the row-major
/// vectorisation index (row * d + col).
template <typename Range>
Matrix superoperator(const Range& kraus) {
  Matrix s;
  for (const auto& k : kraus) {
    Matrix term = kron(k, k.conjugate());
    if (s.size() == 0)
      s = std::move(term);
    else
      s += term;
  }
  return s;
}

/// rho <- S(rho) for a one-qubit superoperator S on `qubit`.
template <typename Derived>
void apply_superop_1q(Eigen::MatrixBase<Derived>& rho, const Matrix4& s, int qubit,
                      int n_qubits) {
  const Index dim = rho.rows();
  const Index m = qubit_mask(n_qubits, qubit);
  for (Index j0 = 0; j0 < dim; ++j0) {
    if (j0 & m) continue;
    const Index j1 = j0 | m;
    for (Index i0 = 0; i0 < dim; ++i0) {
      if (i0 & m) continue;
      const Index i1 = i0 | m;
      const Complex v0 = rho(i0, j0), v1 = rho(i0, j1), v2 = rho(i1, j0), v3 = rho(i1, j1);
      rho(i0, j0) = s(0, 0) * v0 + s(0, 1) * v1 + s(0, 2) * v2 + s(0, 3) * v3;
      rho(i0, j1) = s(1, 0) * v0 + s(1, 1) * v1 + s(1, 2) * v2 + s(1, 3) * v3;
      rho(i1, j0) = s(2, 0) * v0 + s(2, 1) * v1 + s(2, 2) * v2 + s(2, 3) * v3;
      rho(i1, j1) = s(3, 0) * v0 + s(3, 1) * v1 + s(3, 2) * v2 + s(3, 3) * v3;
    }
  }
}

/// rho <- U rho U^dagger for a one-qubit unitary.
template <typename Derived>
void apply_unitary_1q(Eigen::MatrixBase<Derived>& rho, const Matrix2& u, int qubit,
                      int n_qubits) {
  const Index dim = rho.rows();
  const Index m = qubit_mask(n_qubits, qubit);
  for (Index j = 0; j < dim; ++j)
    for (Index i0 = 0; i0 < dim; ++i0) {
      if (i0 & m) continue;
      const Complex a = rho(i0, j), b = rho(i0 | m, j);
      rho(i0, j) = u(0, 0) * a + u(0, 1) * b;
      rho(i0 | m, j) = u(1, 0) * a + u(1, 1) * b;
    }
  const Matrix2 ud = u.conjugate();
  for (Index j0 = 0; j0 < dim; ++j0) {
    if (j0 & m) continue;
    for (Index i = 0; i < dim; ++i) {
      const Complex a = rho(i, j0), b = rho(i, j0 | m);
      rho(i, j0) = a * ud(0, 0) + b * ud(0, 1);
      rho(i, j0 | m) = a * ud(1, 0) + b * ud(1, 1);
    }
  }
}

/// Offsets of the 2^k local basis states of `qubits` within the full index;
/// qubits.front() is the most significant local bit.
std::vector<Index> local_offsets(const std::vector<int>& qubits, int n_qubits);

/// Indices with every bit of `qubits` cleared, ascending.
std::vector<Index> base_indices(const std::vector<int>& qubits, int n_qubits);

/// m <- U m, with U a 2^k x 2^k operator on `qubits` (rows only).
void apply_left(Matrix& m, const Matrix& u, const std::vector<int>& qubits, int n_qubits);

/// rho <- S(rho) for a k-qubit Liouville superoperator S (4^k x 4^k).
void apply_superop(Matrix& rho, const Matrix& s, const std::vector<int>& qubits, int n_qubits);

/// rho <- P rho P^dagger for the Pauli string X^x Z^z (global phase drops out).
template <typename Derived>
void conjugate_pauli(Eigen::MatrixBase<Derived>& rho, std::uint64_t x_mask,
                     std::uint64_t z_mask) {
  if (x_mask == 0 && z_mask == 0) return;
  const Index dim = rho.rows();
  typename Derived::PlainObject out(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    const int pj = parity(static_cast<std::uint64_t>(j) & z_mask);
    for (Index i = 0; i < dim; ++i) {
      const int pi = parity(static_cast<std::uint64_t>(i) & z_mask);
      const Complex v = rho(i, j);
      out(i ^ static_cast<Index>(x_mask), j ^ static_cast<Index>(x_mask)) = (pi ^ pj) ? -v : v;
    }
  }
  rho = out;
}

}  // namespace qecapprox::kernels
