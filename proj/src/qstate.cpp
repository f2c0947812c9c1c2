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

#include "qecapprox/qstate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <string>

#include "qecapprox/kernels.hpp"

namespace qecapprox {
namespace {

int qubits_for_dim(Index dim) {
  if (dim < 1 || !std::has_single_bit(static_cast<std::uint64_t>(dim)))
    throw DimensionMismatch("matrix dimension " + std::to_string(dim) + " is not a power of two");
  return std::countr_zero(static_cast<std::uint64_t>(dim));
}

void check_qubits(const std::vector<int>& qubits, int n_qubits) {
  std::set<int> seen;
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits)
      throw InvalidInput("qubit index " + std::to_string(q) + " out of range for " +
                         std::to_string(n_qubits) + " qubits");
    if (!seen.insert(q).second) throw InvalidInput("repeated qubit index " + std::to_string(q));
  }
}

}  // namespace

namespace kernels {

std::vector<Index> local_offsets(const std::vector<int>& qubits, int n_qubits) {
  const int k = static_cast<int>(qubits.size());
  std::vector<Index> off(Index{1} << k, 0);
  for (Index t = 0; t < static_cast<Index>(off.size()); ++t)
    for (int j = 0; j < k; ++j)
      if (t & (Index{1} << (k - 1 - j))) off[t] |= qubit_mask(n_qubits, qubits[j]);
  return off;
}

std::vector<Index> base_indices(const std::vector<int>& qubits, int n_qubits) {
  Index all = 0;
  for (int q : qubits) all |= qubit_mask(n_qubits, q);
  std::vector<Index> out;
  out.reserve(Index{1} << (n_qubits - static_cast<int>(qubits.size())));
  for (Index i = 0; i < (Index{1} << n_qubits); ++i)
    if ((i & all) == 0) out.push_back(i);
  return out;
}

void apply_left(Matrix& m, const Matrix& u, const std::vector<int>& qubits, int n_qubits) {
  const auto off = local_offsets(qubits, n_qubits);
  const auto bases = base_indices(qubits, n_qubits);
  const Index d = static_cast<Index>(off.size());
  const Index nb = static_cast<Index>(bases.size());
  const Index cols = m.cols();
  Matrix gathered(d, nb * cols);
  for (Index c = 0; c < cols; ++c)
    for (Index b = 0; b < nb; ++b)
      for (Index t = 0; t < d; ++t) gathered(t, c * nb + b) = m(bases[b] + off[t], c);
  const Matrix out = u * gathered;
  for (Index c = 0; c < cols; ++c)
    for (Index b = 0; b < nb; ++b)
      for (Index t = 0; t < d; ++t) m(bases[b] + off[t], c) = out(t, c * nb + b);
}

void apply_superop(Matrix& rho, const Matrix& s, const std::vector<int>& qubits, int n_qubits) {
  if (qubits.size() == 1) {
    const Matrix4 s4 = s;
    apply_superop_1q(rho, s4, qubits.front(), n_qubits);
    return;
  }
  const auto off = local_offsets(qubits, n_qubits);
  const auto bases = base_indices(qubits, n_qubits);
  const Index d = static_cast<Index>(off.size());
  const Index nb = static_cast<Index>(bases.size());
  Matrix gathered(d * d, nb * nb);
  for (Index cb = 0; cb < nb; ++cb)
    for (Index rb = 0; rb < nb; ++rb)
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b)
          gathered(a * d + b, rb * nb + cb) = rho(bases[rb] + off[a], bases[cb] + off[b]);
  const Matrix out = s * gathered;
  for (Index cb = 0; cb < nb; ++cb)
    for (Index rb = 0; rb < nb; ++rb)
      for (Index a = 0; a < d; ++a)
        for (Index b = 0; b < d; ++b)
          rho(bases[rb] + off[a], bases[cb] + off[b]) = out(a * d + b, rb * nb + cb);
}

}  // namespace kernels

DensityMatrix::DensityMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) throw DimensionMismatch("density matrix must be square");
  n_qubits_ = qubits_for_dim(data_.rows());
  const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm >= 1e-10) throw InvalidInput("density matrix is not Hermitian (deviation " + std::to_string(herm) + ")");
  const double tr = std::abs(data_.trace() - Complex(1.0));
  if (tr >= 1e-10) throw InvalidInput("density matrix trace deviates from 1 by " + std::to_string(tr));
}

DensityMatrix DensityMatrix::unchecked(Matrix data) {
  DensityMatrix out;
  out.n_qubits_ = qubits_for_dim(data.rows());
  out.data_ = std::move(data);
  return out;
}

double DensityMatrix::purity() const { return (data_ * data_).trace().real(); }

void DensityMatrix::check_positive(double tol) const {
  const Matrix h = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw InvalidInput("density matrix has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

double completeness_error(const std::vector<Matrix>& operators) {
  if (operators.empty()) return 1.0;
  Matrix sum = Matrix::Zero(operators.front().cols(), operators.front().cols());
  for (const auto& k : operators) sum.noalias() += k.adjoint() * k;
  sum -= Matrix::Identity(sum.rows(), sum.cols());
  return sum.cwiseAbs().maxCoeff();
}

KrausChannel::KrausChannel(std::vector<Matrix> operators, double tol)
    : operators_(std::move(operators)) {
  if (operators_.empty()) throw InvalidChannel("channel needs at least one Kraus operator");
  const Index d = operators_.front().rows();
  for (const auto& k : operators_)
    if (k.rows() != d || k.cols() != d) throw DimensionMismatch("Kraus operators must share one square shape");
  n_qubits_ = qubits_for_dim(d);
  const double err = qecapprox::completeness_error(operators_);
  if (err >= tol) throw InvalidChannel("Kraus completeness violated by " + std::to_string(err));
  superop_ = kernels::superoperator(operators_);
}

double KrausChannel::completeness_error() const { return qecapprox::completeness_error(operators_); }

KrausChannel KrausChannel::identity(int n_qubits) {
  return KrausChannel({Matrix::Identity(Index{1} << n_qubits, Index{1} << n_qubits)});
}

Matrix bloch_to_matrix(const BlochVector& b) {
  Matrix rho(2, 2);
  rho << Complex(0.5 * (1 + b.z)), Complex(0.5 * b.x, -0.5 * b.y),
         Complex(0.5 * b.x, 0.5 * b.y), Complex(0.5 * (1 - b.z));
  return rho;
}

DensityMatrix pure_state(const BlochVector& b) {
  if (std::abs(b.norm() - 1.0) > 1e-6)
    throw InvalidInput("pure state needs a unit Bloch vector (norm " + std::to_string(b.norm()) + ")");
  const Eigen::Vector3d r = b.vec().normalized();
  return DensityMatrix::unchecked(bloch_to_matrix(BlochVector::from(r)));
}

std::pair<Complex, Complex> bloch_amplitudes(const BlochVector& b) {
  if (std::abs(b.norm() - 1.0) > 1e-6)
    throw InvalidInput("pure state needs a unit Bloch vector (norm " + std::to_string(b.norm()) + ")");
  const Eigen::Vector3d r = b.vec().normalized();
  if (r.z() <= -1.0 + 1e-15) return {Complex(0.0), Complex(1.0)};
  const double alpha = std::sqrt(0.5 * (1.0 + r.z()));
  const Complex beta = Complex(r.x(), r.y()) / (2.0 * alpha);
  return {Complex(alpha), beta};
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(kernels::kron(a.matrix(), b.matrix()));
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& qubits) {
  check_qubits(qubits, rho.n_qubits());
  const Index d = Index{1} << qubits.size();
  if (u.rows() != d || u.cols() != d) throw DimensionMismatch("gate size does not match qubit list");
  const double dev = (u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev >= 1e-10) throw InvalidInput("gate is not unitary (deviation " + std::to_string(dev) + ")");

  Matrix m = rho.matrix();
  if (qubits.size() == 1) {
    const Matrix2 u2 = u;
    kernels::apply_unitary_1q(m, u2, qubits.front(), rho.n_qubits());
    return DensityMatrix::unchecked(std::move(m));
  }
  kernels::apply_left(m, u, qubits, rho.n_qubits());
  Matrix mt = m.adjoint();
  kernels::apply_left(mt, u, qubits, rho.n_qubits());
  return DensityMatrix::unchecked(mt.adjoint());
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            const std::vector<int>& qubits) {
  check_qubits(qubits, rho.n_qubits());
  if (static_cast<int>(qubits.size()) != ch.n_qubits())
    throw DimensionMismatch("channel acts on " + std::to_string(ch.n_qubits()) + " qubits, got " +
                            std::to_string(qubits.size()) + " indices");
  if (ch.completeness_error() >= 1e-10) throw InvalidChannel("channel fails Kraus completeness");
  Matrix m = rho.matrix();
  kernels::apply_superop(m, ch.superoperator(), qubits, rho.n_qubits());
  return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix apply_transversal(const DensityMatrix& rho, const KrausChannel& ch) {
  if (ch.n_qubits() != 1) throw DimensionMismatch("transversal application needs a one-qubit channel");
  Matrix m = rho.matrix();
  const Matrix4 s = ch.superoperator();
  for (int q = 0; q < rho.n_qubits(); ++q) kernels::apply_superop_1q(m, s, q, rho.n_qubits());
  return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int n = rho.n_qubits();
  check_qubits(keep, n);
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);

  const auto keep_off = kernels::local_offsets(keep, n);
  const auto trace_off = kernels::local_offsets(traced, n);
  const Index dk = static_cast<Index>(keep_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index j = 0; j < dk; ++j)
    for (Index i = 0; i < dk; ++i) {
      Complex acc = 0.0;
      for (Index t : trace_off) acc += rho.matrix()(keep_off[i] + t, keep_off[j] + t);
      out(i, j) = acc;
    }
  return DensityMatrix::unchecked(std::move(out));
}

std::vector<MeasurementBranch> measure_and_project(const DensityMatrix& rho,
                                                   const std::vector<Matrix>& projectors) {
  if (projectors.empty()) throw InvalidInput("empty projector set");
  const Index d = rho.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const Matrix& p = projectors[i];
    if (p.rows() != d || p.cols() != d) throw DimensionMismatch("projector size does not match state");
    if ((p * p - p).cwiseAbs().maxCoeff() > 1e-9 || (p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
      throw InvalidInput("operator " + std::to_string(i) + " is not an orthogonal projector");
    for (std::size_t j = i + 1; j < projectors.size(); ++j)
      if ((p * projectors[j]).cwiseAbs().maxCoeff() > 1e-9)
        throw InvalidInput("projectors " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    sum += p;
  }
  if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9)
    throw InvalidInput("projectors do not resolve the identity");

  std::vector<MeasurementBranch> out;
  out.reserve(projectors.size());
  for (const auto& p : projectors) {
    const double prob = std::max(0.0, (p * rho.matrix()).trace().real());
    MeasurementBranch br{prob, std::nullopt};
    if (prob >= 1e-14) {
      Matrix post = p * rho.matrix() * p / prob;
      br.state = DensityMatrix::unchecked(0.5 * (post + post.adjoint()));
    }
    out.push_back(std::move(br));
  }
  return out;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("trace distance between " + std::to_string(rho.dim()) + "- and " +
                            std::to_string(sigma.dim()) + "-dimensional states");
  const Matrix diff = rho.matrix() - sigma.matrix();
  if (diff.rows() == 2) {
    // Traceless-part eigenvalues are +-|r|/2 for a 2x2 Hermitian difference.
    const Complex a = 0.5 * (diff(0, 0) - diff(1, 1));
    const double t = 0.5 * (diff(0, 0) + diff(1, 1)).real();
    const double r = std::sqrt(std::norm(a) + std::norm(0.5 * (diff(0, 1) + std::conj(diff(1, 0)))));
    return 0.5 * (std::abs(t + r) + std::abs(t - r));
  }
  const Matrix h = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity_pure(const DensityMatrix& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) throw DimensionMismatch("fidelity between states of different size");
  if (psi.purity() < 1.0 - 1e-8) throw InvalidInput("reference state for fidelity_pure is not pure");
  // Tr(psi rho) = <psi|rho|psi> for psi = |psi><psi|.
  const double overlap = (psi.matrix().transpose().cwiseProduct(rho.matrix())).sum().real();
  return std::sqrt(std::clamp(overlap, 0.0, 1.0));
}

}  // namespace qecapprox
