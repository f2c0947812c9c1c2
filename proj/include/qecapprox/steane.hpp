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

// The Steane [[7,1,3]] code.
//
// Syndromes are 6-bit integers: bit k is the outcome of generator k, with
// the three X-type generators first (k = 0..2) and the Z-type ones after.
// Pauli strings are stored as X/Z bit masks in basis-index order, so qubit 0
// is the most significant bit.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qecapprox/qstate.hpp"

namespace qecapprox {

inline constexpr int kSteaneQubits = 7;
inline constexpr int kSteaneGenerators = 6;
inline constexpr int kSyndromeCount = 64;

struct PauliString {
  std::uint32_t x = 0;
  std::uint32_t z = 0;

  /// Parses strings like "IIIXXXX"; character q is qubit q.
  static PauliString parse(std::string_view s);
  std::string str(int n_qubits = kSteaneQubits) const;

  int weight() const;
  bool commutes_with(const PauliString& other) const;
  /// Qubits with a non-identity factor, ascending.
  std::vector<int> support(int n_qubits = kSteaneQubits) const;
  /// Dense matrix, Y = iXZ so the string is Hermitian.
  Matrix matrix(int n_qubits = kSteaneQubits) const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

class SteaneCode {
 public:
  static const SteaneCode& get();

  const std::array<PauliString, 3>& x_generators() const { return x_gens_; }
  const std::array<PauliString, 3>& z_generators() const { return z_gens_; }
  /// X-type then Z-type, matching syndrome bit order.
  const std::array<PauliString, kSteaneGenerators>& generators() const { return gens_; }

  const Vector& logical_zero() const { return zero_; }
  const Vector& logical_one() const { return one_; }
  PauliString logical_x() const { return {0x7f, 0}; }
  PauliString logical_z() const { return {0, 0x7f}; }

  /// Bit k set when `e` anticommutes with generator k.
  int syndrome(const PauliString& e) const;

 private:
  SteaneCode();

  std::array<PauliString, 3> x_gens_;
  std::array<PauliString, 3> z_gens_;
  std::array<PauliString, kSteaneGenerators> gens_;
  Vector zero_;
  Vector one_;
};

/// alpha |0_L> + beta |1_L> for the amplitudes of the Bloch vector.
DensityMatrix encode(const BlochVector& b);
Vector encode_vector(const BlochVector& b);

struct CorrectableSet {
  /// I, X_q, Z_q, Y_q, then X_i Z_j for i != j.
  std::vector<PauliString> errors;
  /// Correction indexed by syndrome.
  std::array<PauliString, kSyndromeCount> correction;

  /// Projector onto the syndrome-s subspace, built on first use.
  const Matrix& projector(int s) const;
};

const CorrectableSet& correctable_set();

/// Noiseless syndrome measurement followed by the table correction.
DensityMatrix perfect_ec(const DensityMatrix& rho);

/// Same channel through the explicit projectors; slow, kept as a reference.
DensityMatrix perfect_ec_reference(const DensityMatrix& rho);

struct SyndromeOutcome {
  int bits = 0;  // 6-bit syndrome
  int round = 0;
};

struct FaultyBranch {
  double probability = 0.0;
  int bit = 0;
  /// Normalised post-measurement state; empty when probability < 1e-14.
  std::optional<DensityMatrix> state;
};

/// Cat-state measurement of one weight-4 generator with `noise` after every
/// controlled gate on both qubits it touches. Simulated on 11 qubits.
std::vector<FaultyBranch> measure_generator_faulty(const DensityMatrix& rho, const PauliString& gen,
                                                   const KrausChannel& noise);

/// The same measurement as a two-outcome instrument on the data register:
/// outcome[b] is a superoperator on the generator's support qubits.
struct GeneratorInstrument {
  std::vector<int> support;
  std::array<Matrix, 2> outcome;
  Matrix total;  // outcome[0] + outcome[1]
};

std::vector<GeneratorInstrument> faulty_instruments(const KrausChannel& noise);

/// Two rounds of faulty syndrome extraction, a third on disagreement, then
/// noiseless correction with the definitive syndrome.
DensityMatrix faulty_ec(const DensityMatrix& rho, const KrausChannel& noise);

/// sqrt(sum_i <psi|E_i^dag rho E_i|psi>) over the correctable errors.
double ec_fidelity(const DensityMatrix& psi, const DensityMatrix& rho);

}  // namespace qecapprox
