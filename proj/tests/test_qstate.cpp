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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qecapprox/channels.hpp"
#include "qecapprox/qstate.hpp"

namespace qecapprox {
namespace {

Matrix ket_bra(std::initializer_list<Complex> amps) {
  Vector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (auto a : amps) v(i++) = a;
  return v * v.adjoint();
}

Matrix basis_projector(Index d, Index k) {
  Matrix m = Matrix::Zero(d, d);
  m(k, k) = 1;
  return m;
}

TEST(PureState, PolesAndEquator) {
  EXPECT_TRUE(pure_state({0, 0, 1}).matrix().isApprox(basis_projector(2, 0), 1e-12));
  EXPECT_TRUE(pure_state({0, 0, -1}).matrix().isApprox(basis_projector(2, 1), 1e-12));
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  EXPECT_TRUE(pure_state({1, 0, 0}).matrix().isApprox(plus, 1e-12));
}

TEST(PureState, RandomDirectionsArePure) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto r = oracle::random_unit(rng);
    const auto rho = pure_state(BlochVector::from(r));
    EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
    EXPECT_TRUE(oracle::bloch_of(rho.matrix()).isApprox(r, 1e-12));
  }
}

TEST(PureState, RejectsOffSphere) {
  EXPECT_THROW(pure_state({0, 0, 0.5}), InvalidInput);
  EXPECT_THROW(pure_state({1, 1, 0}), InvalidInput);
}

TEST(DensityMatrix, ValidatesHermiticityAndTrace) {
  Matrix m(2, 2);
  m << 0.5, 0.3, 0.1, 0.5;
  EXPECT_THROW(DensityMatrix{m}, InvalidInput);
  m << 0.6, 0, 0, 0.6;
  EXPECT_THROW(DensityMatrix{m}, InvalidInput);
  m << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix{m}.check_positive(), InvalidInput);
}

TEST(Tensor, Products) {
  const auto zero = pure_state({0, 0, 1});
  EXPECT_TRUE(tensor(zero, zero).matrix().isApprox(basis_projector(4, 0), 1e-12));

  const DensityMatrix mixed(Matrix::Identity(2, 2) / 2.0);
  EXPECT_TRUE(tensor(mixed, mixed).matrix().isApprox(Matrix::Identity(4, 4) / 4.0, 1e-12));

  const auto pp = tensor(pure_state({1, 0, 0}), pure_state({0, 0, -1}));
  EXPECT_EQ(pp.n_qubits(), 2);
  EXPECT_NEAR(pp.trace(), 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(pp.matrix());
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0, 1e-12);
}

TEST(ApplyUnitary, SmallCircuits) {
  const auto zero = pure_state({0, 0, 1});
  EXPECT_TRUE(apply_unitary(zero, pauli::X(), {0}).matrix().isApprox(basis_projector(2, 1), 1e-12));

  Matrix cnot = Matrix::Identity(4, 4);
  cnot(2, 2) = cnot(3, 3) = 0;
  cnot(2, 3) = cnot(3, 2) = 1;
  const DensityMatrix ten(basis_projector(4, 2));
  EXPECT_TRUE(apply_unitary(ten, cnot, {0, 1}).matrix().isApprox(basis_projector(4, 3), 1e-12));

  EXPECT_TRUE(apply_unitary(zero, pauli::H(), {0}).matrix().isApprox(pure_state({1, 0, 0}).matrix(), 1e-12));
}

TEST(ApplyUnitary, MatchesFullEmbedding) {
  std::mt19937_64 rng(2);
  Matrix cnot = Matrix::Identity(4, 4);
  cnot(2, 2) = cnot(3, 3) = 0;
  cnot(2, 3) = cnot(3, 2) = 1;
  const DensityMatrix rho(oracle::random_density(8, rng));
  for (std::vector<int> q : {std::vector<int>{2, 0}, {1, 2}, {0, 2}}) {
    const Matrix expect = oracle::embed(cnot, q, 3) * rho.matrix() * oracle::embed(cnot, q, 3).adjoint();
    EXPECT_TRUE(apply_unitary(rho, cnot, q).matrix().isApprox(expect, 1e-12));
  }
}

TEST(ApplyUnitary, PreservesSpectrum) {
  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    const DensityMatrix rho(oracle::random_density(Index(1) << n, rng));
    Matrix h = Matrix::Random(4, 4);
    h = (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> hs(h);
    const Matrix u = hs.eigenvectors() *
                     hs.eigenvalues().unaryExpr([](double x) { return std::exp(Complex(0, x)); }).asDiagonal() *
                     hs.eigenvectors().adjoint();
    const auto out = apply_unitary(rho, u, {n - 1, 0});
    Eigen::SelfAdjointEigenSolver<Matrix> a(rho.matrix()), b(out.matrix());
    EXPECT_TRUE(a.eigenvalues().isApprox(b.eigenvalues(), 1e-9));
  }
}

TEST(ApplyUnitary, RejectsNonUnitaryAndBadQubits) {
  const auto zero = pure_state({0, 0, 1});
  EXPECT_THROW(apply_unitary(zero, 2.0 * pauli::X(), {0}), InvalidInput);
  EXPECT_THROW(apply_unitary(zero, pauli::X(), {1}), InvalidInput);
  const auto two = tensor(zero, zero);
  EXPECT_THROW(apply_unitary(two, Matrix::Identity(4, 4), {0, 0}), InvalidInput);
}

TEST(ApplyChannel, AmplitudeDamping) {
  const auto one = pure_state({0, 0, -1});
  EXPECT_TRUE(apply_channel(one, adc(1.0), {0}).matrix().isApprox(basis_projector(2, 0), 1e-12));

  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 0.36;
  expect(1, 1) = 0.64;
  EXPECT_TRUE(apply_channel(one, adc(0.36), {0}).matrix().isApprox(expect, 1e-12));

  const auto rho = pure_state({0.6, 0, 0.8});
  EXPECT_TRUE(apply_channel(rho, KrausChannel::identity(), {0}).matrix().isApprox(rho.matrix(), 1e-14));
}

TEST(ApplyChannel, MatchesKrausOracleOnSelectedQubit) {
  std::mt19937_64 rng(4);
  const DensityMatrix rho(oracle::random_density(8, rng));
  const auto ch = pol_channel(0.3, 0.2);
  std::vector<Matrix> ks(ch.operators().begin(), ch.operators().end());
  for (int q = 0; q < 3; ++q) {
    const auto out = apply_channel(rho, ch, {q});
    EXPECT_TRUE(out.matrix().isApprox(oracle::apply_kraus(rho.matrix(), ks, {q}, 3), 1e-12));
    EXPECT_NEAR(out.trace(), 1.0, 1e-10);
  }
}

TEST(ApplyChannel, TransversalEqualsQubitByQubit) {
  std::mt19937_64 rng(5);
  const DensityMatrix rho(oracle::random_density(8, rng));
  const auto ch = adc(0.2);
  DensityMatrix serial = rho;
  for (int q = 0; q < 3; ++q) serial = apply_channel(serial, ch, {q});
  EXPECT_TRUE(apply_transversal(rho, ch).matrix().isApprox(serial.matrix(), 1e-12));
}

TEST(KrausChannelTest, CompletenessIsChecked) {
  Matrix half = Matrix::Identity(2, 2) * 0.5;
  EXPECT_THROW(KrausChannel({half}), InvalidChannel);
  EXPECT_THROW(KrausChannel({Matrix::Identity(3, 3)}), InvalidInput);
  EXPECT_LT(adc(0.3).completeness_error(), 1e-12);
}

TEST(PartialTrace, Examples) {
  const auto zero = pure_state({0, 0, 1});
  EXPECT_TRUE(partial_trace(tensor(zero, zero), {0}).matrix().isApprox(zero.matrix(), 1e-12));

  const DensityMatrix bell(ket_bra({M_SQRT1_2, 0, 0, M_SQRT1_2}));
  EXPECT_TRUE(partial_trace(bell, {0}).matrix().isApprox(Matrix::Identity(2, 2) / 2.0, 1e-12));
  EXPECT_TRUE(partial_trace(bell, {1}).matrix().isApprox(Matrix::Identity(2, 2) / 2.0, 1e-12));

  const auto plus = pure_state({1, 0, 0});
  EXPECT_TRUE(partial_trace(tensor(plus, pure_state({0, 0, -1})), {0}).matrix().isApprox(plus.matrix(), 1e-12));
}

TEST(PartialTrace, RecoversFactors) {
  std::mt19937_64 rng(6);
  const DensityMatrix a(oracle::random_density(4, rng)), b(oracle::random_density(2, rng));
  const auto ab = tensor(a, b);
  EXPECT_TRUE(partial_trace(ab, {0, 1}).matrix().isApprox(a.matrix(), 1e-12));
  EXPECT_TRUE(partial_trace(ab, {2}).matrix().isApprox(b.matrix(), 1e-12));
}

TEST(MeasureAndProject, ComputationalAndXBasis) {
  const auto plus = pure_state({1, 0, 0});
  auto z = measure_and_project(plus, {basis_projector(2, 0), basis_projector(2, 1)});
  ASSERT_EQ(z.size(), 2u);
  EXPECT_NEAR(z[0].probability, 0.5, 1e-12);
  EXPECT_TRUE(z[1].state->matrix().isApprox(basis_projector(2, 1), 1e-12));

  auto x = measure_and_project(plus, {pure_state({1, 0, 0}).matrix(), pure_state({-1, 0, 0}).matrix()});
  EXPECT_NEAR(x[0].probability, 1.0, 1e-12);
  EXPECT_TRUE(x[0].state->matrix().isApprox(plus.matrix(), 1e-12));
  EXPECT_FALSE(x[1].state.has_value());
}

TEST(MeasureAndProject, CatStateHasEvenXParity) {
  Vector cat = Vector::Zero(16);
  cat(0) = cat(15) = M_SQRT1_2;
  const DensityMatrix rho(cat * cat.adjoint());
  // Parity projectors in the X basis: (I +- XXXX) / 2.
  const Matrix xxxx = oracle::pauli_string("XXXX");
  const Matrix even = (Matrix::Identity(16, 16) + xxxx) / 2.0, odd = (Matrix::Identity(16, 16) - xxxx) / 2.0;
  auto b = measure_and_project(rho, {even, odd});
  EXPECT_NEAR(b[0].probability, 1.0, 1e-12);
  EXPECT_NEAR(b[1].probability, 0.0, 1e-12);
}

TEST(MeasureAndProject, RejectsIncompleteSet) {
  EXPECT_THROW(measure_and_project(pure_state({0, 0, 1}), {basis_projector(2, 0)}), InvalidInput);
}

TEST(MeasureAndProject, RandomCompleteSetsSumToOne) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho(oracle::random_density(4, rng));
    Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::random_density(4, rng));
    std::vector<Matrix> ps;
    for (int k = 0; k < 4; ++k) ps.push_back(es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint());
    double total = 0;
    for (const auto& b : measure_and_project(rho, ps)) {
      EXPECT_GE(b.probability, 0.0);
      total += b.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(TraceDistance, Examples) {
  const auto zero = pure_state({0, 0, 1});
  EXPECT_NEAR(trace_distance(zero, zero), 0.0, 1e-14);
  EXPECT_NEAR(trace_distance(zero, pure_state({0, 0, -1})), 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(zero, pure_state({1, 0, 0})), M_SQRT1_2, 1e-12);
  EXPECT_THROW(trace_distance(zero, tensor(zero, zero)), DimensionMismatch);
}

TEST(TraceDistance, ContractiveUnderChannels) {
  std::mt19937_64 rng(8);
  const std::vector<KrausChannel> channels{adc(0.3), pol_channel(0.7, 0.4), model_to_kraus(depolarizing(0.2))};
  for (int t = 0; t < 30; ++t) {
    const DensityMatrix a(oracle::random_density(2, rng)), b(oracle::random_density(2, rng));
    EXPECT_NEAR(trace_distance(a, b), oracle::trace_norm_half(a.matrix() - b.matrix()), 1e-12);
    for (const auto& ch : channels)
      EXPECT_LE(trace_distance(apply_channel(a, ch, {0}), apply_channel(b, ch, {0})), trace_distance(a, b) + 1e-10);
  }
}

TEST(FidelityPure, Examples) {
  const auto zero = pure_state({0, 0, 1});
  EXPECT_NEAR(fidelity_pure(zero, zero), 1.0, 1e-12);
  EXPECT_NEAR(fidelity_pure(zero, pure_state({0, 0, -1})), 0.0, 1e-12);
  EXPECT_NEAR(fidelity_pure(zero, DensityMatrix(Matrix::Identity(2, 2) / 2.0)), M_SQRT1_2, 1e-12);
  EXPECT_THROW(fidelity_pure(DensityMatrix(Matrix::Identity(2, 2) / 2.0), zero), InvalidInput);
}

}  // namespace
}  // namespace qecapprox
