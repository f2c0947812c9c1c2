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
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qecapprox/channels.hpp"
#include "qecapprox/steane.hpp"

namespace qecapprox {
namespace {

const SteaneCode& code() { return SteaneCode::get(); }

DensityMatrix zero_l() { return encode({0, 0, 1}); }

DensityMatrix conjugate(const DensityMatrix& rho, const PauliString& p) {
  const Matrix m = p.matrix();
  return DensityMatrix::unchecked(m * rho.matrix() * m.adjoint());
}

DensityMatrix random_codeword(std::mt19937_64& rng) { return encode(BlochVector::from(oracle::random_unit(rng))); }

TEST(PauliStringTest, ParseAndPrint) {
  const auto p = PauliString::parse("IXYZIII");
  EXPECT_EQ(p.str(), "IXYZIII");
  EXPECT_EQ(p.weight(), 3);
  EXPECT_EQ(p.support(), (std::vector<int>{1, 2, 3}));
  EXPECT_TRUE(p.matrix().isApprox(oracle::pauli_string("IXYZIII"), 1e-15));
  EXPECT_THROW(PauliString::parse("IXQ"), InvalidInput);
}

TEST(PauliStringTest, CommutationMatchesMatrices) {
  const std::vector<std::string> s{"XIIIIII", "ZIIIIII", "YYIIIII", "XZIIIII", "IIIXXXX", "IIIZZZZ", "ZIZIZIZ"};
  for (const auto& a : s)
    for (const auto& b : s)
      EXPECT_EQ(PauliString::parse(a).commutes_with(PauliString::parse(b)),
                !oracle::anticommute(oracle::pauli_string(a), oracle::pauli_string(b)))
          << a << " " << b;
}

TEST(SteaneCodeTest, Generators) {
  EXPECT_EQ(code().x_generators()[0].str(), "IIIXXXX");
  EXPECT_EQ(code().x_generators()[1].str(), "IXXIIXX");
  EXPECT_EQ(code().x_generators()[2].str(), "XIXIXIX");
  EXPECT_EQ(code().z_generators()[0].str(), "IIIZZZZ");
  for (const auto& a : code().generators()) {
    EXPECT_EQ(a.weight(), 4);
    for (const auto& b : code().generators()) EXPECT_TRUE(a.commutes_with(b));
  }
}

TEST(SteaneCodeTest, Codewords) {
  const Vector& z = code().logical_zero();
  const Vector& o = code().logical_one();
  EXPECT_TRUE(z.isApprox(oracle::steane_zero(), 1e-14));
  EXPECT_NEAR(std::abs(z.dot(o)), 0.0, 1e-14);
  EXPECT_TRUE((code().logical_x().matrix() * z).isApprox(o, 1e-14));
  EXPECT_TRUE((code().logical_z().matrix() * o).isApprox(-o, 1e-14));
  for (const auto& g : code().generators()) {
    EXPECT_TRUE((g.matrix() * z).isApprox(z, 1e-12));
    EXPECT_TRUE((g.matrix() * o).isApprox(o, 1e-12));
  }
  int support = 0;
  for (Index i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) > 1e-12) {
      ++support;
      EXPECT_NEAR(std::abs(z(i)), 1 / std::sqrt(8.0), 1e-14);
    }
  EXPECT_EQ(support, 8);
}

TEST(Encode, Examples) {
  EXPECT_TRUE(encode({0, 0, -1}).matrix().isApprox(
      code().logical_one() * code().logical_one().adjoint(), 1e-12));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const auto r = random_codeword(rng);
    EXPECT_NEAR(r.purity(), 1.0, 1e-10);
    EXPECT_NEAR(ec_fidelity(r, r), 1.0, 1e-10);
  }
}

TEST(CorrectableSetTest, SixtyFourDistinctErrors) {
  const auto& cs = correctable_set();
  ASSERT_EQ(cs.errors.size(), 64u);
  std::set<int> syndromes;
  for (const auto& e : cs.errors) {
    syndromes.insert(code().syndrome(e));
    EXPECT_LE(e.weight(), 2);
    EXPECT_EQ(cs.correction[code().syndrome(e)], e);
  }
  EXPECT_EQ(syndromes.size(), 64u);
  EXPECT_EQ(code().syndrome(PauliString{}), 0);
}

TEST(CorrectableSetTest, SyndromeMatchesBruteForceCommutation) {
  for (int q = 0; q < 7; ++q) {
    std::string s(7, 'I');
    s[q] = 'X';
    int bits = 0;
    for (int k = 0; k < 6; ++k)
      if (oracle::anticommute(oracle::pauli_string(s), code().generators()[k].matrix())) bits |= 1 << k;
    EXPECT_EQ(code().syndrome(PauliString::parse(s)), bits);
    EXPECT_EQ(bits & 0b000111, 0);  // X errors are seen only by Z-type generators
  }
}

TEST(CorrectableSetTest, ProjectorsResolveIdentity) {
  const auto& cs = correctable_set();
  Matrix sum = Matrix::Zero(128, 128);
  for (int s = 0; s < kSyndromeCount; ++s) {
    const Matrix& p = cs.projector(s);
    EXPECT_NEAR(p.trace().real(), 2.0, 1e-10);
    EXPECT_TRUE((p * p).isApprox(p, 1e-10));
    sum += p;
  }
  EXPECT_TRUE(sum.isApprox(Matrix::Identity(128, 128), 1e-10));
  EXPECT_LT((cs.projector(3) * cs.projector(17)).norm(), 1e-10);
}

TEST(PerfectEc, CorrectsEveryCorrectableError) {
  std::mt19937_64 rng(2);
  const auto psi = random_codeword(rng);
  for (const auto& e : correctable_set().errors) {
    const auto out = perfect_ec(conjugate(psi, e));
    EXPECT_NEAR(fidelity_pure(psi, out), 1.0, 1e-9) << e.str();
    EXPECT_NEAR(ec_fidelity(psi, conjugate(psi, e)), 1.0, 1e-9) << e.str();
  }
}

TEST(PerfectEc, TwoBitFlipsBecomeALogicalFlip) {
  // X_1 X_2 has the syndrome of a single X on qubit 1 ^ 2 = 3 (1-based
  // positions in the Hamming check matrix), so the decoder completes a
  // logical X.
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) {
      std::string s(7, 'I');
      s[a] = s[b] = 'X';
      const auto rho = conjugate(zero_l(), PauliString::parse(s));
      EXPECT_NEAR(fidelity_pure(zero_l(), perfect_ec(rho)), 0.0, 1e-9) << s;
      EXPECT_NEAR(ec_fidelity(zero_l(), rho), 0.0, 1e-9) << s;
    }
}

TEST(PerfectEc, LeavesCodespaceUntouched) {
  std::mt19937_64 rng(3);
  const Vector a = encode_vector(BlochVector::from(oracle::random_unit(rng)));
  const Vector b = encode_vector(BlochVector::from(oracle::random_unit(rng)));
  const DensityMatrix mixed(0.3 * a * a.adjoint() + 0.7 * b * b.adjoint());
  EXPECT_TRUE(perfect_ec(mixed).matrix().isApprox(mixed.matrix(), 1e-10));
}

TEST(PerfectEc, FastPathMatchesProjectors) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho(oracle::random_density(128, rng, 3));
    const auto fast = perfect_ec(rho);
    EXPECT_TRUE(fast.matrix().isApprox(perfect_ec_reference(rho).matrix(), 1e-10));
    EXPECT_NEAR(fast.trace(), 1.0, 1e-10);
  }
}

TEST(PerfectEc, PauliStringsMapToCodewordOrLogical) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> bits(0, 127);
  const auto psi = zero_l();
  const Matrix lx = code().logical_x().matrix();
  for (int t = 0; t < 40; ++t) {
    const PauliString p{static_cast<std::uint32_t>(bits(rng)), static_cast<std::uint32_t>(bits(rng))};
    const auto out = perfect_ec(conjugate(psi, p));
    const double keep = fidelity_pure(psi, out);
    const double flip = fidelity_pure(DensityMatrix::unchecked(lx * psi.matrix() * lx.adjoint()), out);
    EXPECT_NEAR(keep * keep + flip * flip, 1.0, 1e-9);
    EXPECT_TRUE(std::abs(keep) < 1e-9 || std::abs(keep - 1) < 1e-9);
  }
}

TEST(EcFidelity, EqualsFidelityAfterPerfectEc) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto psi = random_codeword(rng);
    const DensityMatrix rho(oracle::random_density(128, rng, 2));
    EXPECT_NEAR(ec_fidelity(psi, rho), fidelity_pure(psi, perfect_ec(rho)), 1e-9);
  }
}

TEST(EcFidelity, LogicalFlipAndInvalidReference) {
  const Matrix lx = code().logical_x().matrix();
  const auto flipped = DensityMatrix::unchecked(lx * zero_l().matrix() * lx.adjoint());
  EXPECT_NEAR(ec_fidelity(zero_l(), flipped), 0.0, 1e-10);
  Vector outside = Vector::Zero(128);
  outside(1) = 1;
  EXPECT_THROW(ec_fidelity(DensityMatrix(outside * outside.adjoint()), zero_l()), InvalidInput);
}

TEST(EcFidelity, NonIncreasingUnderTransversalDamping) {
  const auto psi = encode({0.6, 0, -0.8});
  double last = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double g = 0.02 * i;
    const double f = ec_fidelity(psi, apply_transversal(psi, adc(g)));
    EXPECT_LE(f, last + 1e-12) << "gamma " << g;
    last = f;
  }
}

TEST(FaultyMeasurement, NoiselessOutcomes) {
  const auto none = adc(0.0);
  auto b = measure_generator_faulty(zero_l(), code().x_generators()[0], none);
  double p0 = 0;
  for (const auto& br : b)
    if (br.bit == 0) {
      p0 += br.probability;
      EXPECT_TRUE(br.state->matrix().isApprox(zero_l().matrix(), 1e-10));
    }
  EXPECT_NEAR(p0, 1.0, 1e-12);

  // X on qubit 3 anticommutes with IIIZZZZ.
  const auto err = conjugate(zero_l(), PauliString::parse("IIIXIII"));
  double p1 = 0;
  for (const auto& br : measure_generator_faulty(err, code().z_generators()[0], none))
    if (br.bit == 1) p1 += br.probability;
  EXPECT_NEAR(p1, 1.0, 1e-12);
}

TEST(FaultyMeasurement, WrongBitProbabilityIsFirstOrder) {
  for (double g : {1e-4, 2e-4}) {
    double wrong = 0, total = 0;
    for (const auto& br : measure_generator_faulty(zero_l(), code().z_generators()[1], adc(g))) {
      total += br.probability;
      if (br.bit == 1) wrong += br.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    EXPECT_LT(wrong, 10 * g * 4);
  }
}

TEST(FaultyInstruments, MatchElevenQubitReference) {
  std::mt19937_64 rng(7);
  const auto noise = adc(0.05);
  const auto inst = faulty_instruments(noise);
  ASSERT_EQ(inst.size(), 6u);
  const DensityMatrix rho(oracle::random_density(128, rng, 2));
  for (int k : {0, 4}) {
    const auto ref = measure_generator_faulty(rho, code().generators()[k], noise);
    Matrix by_bit[2] = {Matrix::Zero(128, 128), Matrix::Zero(128, 128)};
    for (const auto& br : ref)
      if (br.state) by_bit[br.bit] += br.probability * br.state->matrix();
    // Each outcome map is CP: recover Kraus operators from its Choi matrix
    // and apply them through a full 7-qubit embedding.
    for (int b = 0; b < 2; ++b) {
      const Matrix& s = inst[k].outcome[b];
      // Choi matrix of a row-major Liouville superoperator on 4 qubits.
      const Index d = 16;
      Matrix choi = Matrix::Zero(d * d, d * d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
          for (Index k2 = 0; k2 < d; ++k2)
            for (Index l = 0; l < d; ++l) choi(i * d + k2, j * d + l) = s(i * d + j, k2 * d + l);
      Eigen::SelfAdjointEigenSolver<Matrix> es(choi);
      Matrix out = Matrix::Zero(128, 128);
      for (Index e = 0; e < d * d; ++e) {
        const double lam = es.eigenvalues()(e);
        if (lam < 1e-14) continue;
        Matrix kraus(d, d);
        for (Index i = 0; i < d; ++i)
          for (Index k2 = 0; k2 < d; ++k2) kraus(i, k2) = std::sqrt(lam) * es.eigenvectors()(i * d + k2, e);
        const Matrix full = oracle::embed(kraus, inst[k].support, 7);
        out += full * rho.matrix() * full.adjoint();
      }
      EXPECT_TRUE(out.isApprox(by_bit[b], 1e-9)) << "generator " << k << " bit " << b;
    }
  }
}

TEST(FaultyEc, NoiselessEqualsPerfect) {
  std::mt19937_64 rng(8);
  const auto none = adc(0.0);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho(oracle::random_density(128, rng, 2));
    EXPECT_TRUE(faulty_ec(rho, none).matrix().isApprox(perfect_ec(rho).matrix(), 1e-9));
  }
  const auto psi = random_codeword(rng);
  EXPECT_TRUE(faulty_ec(psi, none).matrix().isApprox(psi.matrix(), 1e-10));
  const auto err = conjugate(psi, PauliString::parse("IIZIXII"));
  EXPECT_NEAR(fidelity_pure(psi, faulty_ec(err, none)), 1.0, 1e-10);
}

TEST(FaultyEc, PreservesTrace) {
  const auto psi = encode({0, 0.6, 0.8});
  for (double g : {1e-3, 0.05}) {
    const auto out = faulty_ec(apply_transversal(psi, adc(g)), adc(g));
    EXPECT_NEAR(out.trace(), 1.0, 1e-9);
    EXPECT_LT(ec_fidelity(psi, out), 1.0);
  }
}

}  // namespace
}  // namespace qecapprox
