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

// Single-qubit target channels, stabilizer operation sets and the two
// channel representations used by the fitter (Pauli-basis process matrix
// and Bloch affine map).

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qecapprox/qstate.hpp"

namespace qecapprox {

namespace pauli {
const Matrix2& I();
const Matrix2& X();
const Matrix2& Y();
const Matrix2& Z();
const Matrix2& H();
const Matrix2& S();
/// {I, X, Y, Z}
const std::array<Matrix2, 4>& basis();
}  // namespace pauli

/// Amplitude damping with Kraus pair |0><0| + sqrt(1-g)|1><1|, sqrt(g)|0><1|.
KrausChannel adc(double gamma);

/// Polarisation about the axis (cos phi, sin phi, 0): sqrt(1-p) I and
/// sqrt(p) (cos phi X + sin phi Y).
KrausChannel pol_channel(double phi, double p);

/// The 24 single-qubit Cliffords, phase-canonical (first nonzero entry real
/// positive) and sorted lexicographically by entries.
const std::vector<Matrix2>& clifford_group();

/// Canonical global phase: first entry with |.| > 1e-12 made real positive.
Matrix2 canonical_phase(const Matrix2& u);

struct TranslationPair {
  std::string label;  // "0", "1", "+", "-", "+i", "-i"
  Matrix2 project;    // |l><l|
  Matrix2 flip;       // |l><l_perp|
  BlochVector target;
};

/// Measurement-induced translations in the order |0>,|1>,|+>,|->,|+i>,|-i>.
const std::vector<TranslationPair>& translation_pairs();

enum class SetKind { PC, CC, PMC, CMC, DC };

std::string_view to_string(SetKind kind);
SetKind set_kind_from_string(std::string_view s);

/// One element of an operation set: a single unitary or a translation pair.
struct Operation {
  std::string label;
  std::vector<Matrix2> kraus;
};

class OperationSet {
 public:
  static OperationSet make(SetKind kind);

  SetKind kind() const { return kind_; }
  const std::vector<Operation>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  /// True for DC: the X, Y, Z weights are tied equal.
  bool tied_paulis() const { return kind_ == SetKind::DC; }

 private:
  SetKind kind_ = SetKind::PC;
  std::vector<Operation> elements_;
};

struct ChannelModel {
  OperationSet set;
  Eigen::VectorXd probs;

  /// Throws InvalidInput unless probs >= 0, sum = 1 (1e-10), tied weights
  /// equal for DC.
  void validate() const;
};

ChannelModel make_model(SetKind kind, Eigen::VectorXd probs);

/// PC-set model with probabilities (1-p, p/3, p/3, p/3).
ChannelModel depolarizing(double p);

KrausChannel model_to_kraus(const ChannelModel& m);

struct ProcessMatrix {
  /// rho -> sum_mn chi(m, n) sigma_m rho sigma_n^dagger, sigma = {I, X, Y, Z}.
  Matrix4 chi;
};

ProcessMatrix process_matrix(const KrausChannel& ch);
ProcessMatrix process_matrix(const std::vector<Matrix2>& kraus);

/// Apply a process matrix to a one-qubit operator.
Matrix2 apply_process(const ProcessMatrix& pm, const Matrix2& rho);

struct BlochAffineMap {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  Eigen::Vector3d c = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& r) const { return m * r + c; }
};

BlochAffineMap bloch_affine_map(const KrausChannel& ch);
BlochAffineMap bloch_affine_map(const std::vector<Matrix2>& kraus);

/// (1/N^2) sum_i |Tr K_i|^2, the average fidelity against the identity.
double average_fidelity_to_identity(const KrausChannel& ch);

std::vector<Matrix2> as_2x2(const KrausChannel& ch);

}  // namespace qecapprox
