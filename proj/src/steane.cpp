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

#include "qecapprox/steane.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qecapprox/channels.hpp"
#include "qecapprox/kernels.hpp"

namespace qecapprox {

using kernels::parity;

PauliString PauliString::parse(std::string_view s) {
  const int n = static_cast<int>(s.size());
  if (n == 0 || n > 31) throw InvalidInput("Pauli string length must be in [1, 31]");
  PauliString p;
  for (int q = 0; q < n; ++q) {
    const std::uint32_t m = 1u << (n - 1 - q);
    switch (s[q]) {
      case 'I': break;
      case 'X': p.x |= m; break;
      case 'Z': p.z |= m; break;
      case 'Y': p.x |= m; p.z |= m; break;
      default: throw InvalidInput("bad Pauli character '" + std::string(1, s[q]) + "'");
    }
  }
  return p;
}

std::string PauliString::str(int n_qubits) const {
  std::string out;
  for (int q = 0; q < n_qubits; ++q) {
    const std::uint32_t m = 1u << (n_qubits - 1 - q);
    const bool bx = x & m, bz = z & m;
    out += bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  return out;
}

int PauliString::weight() const { return std::popcount(x | z); }

bool PauliString::commutes_with(const PauliString& o) const {
  return ((std::popcount(x & o.z) + std::popcount(z & o.x)) & 1) == 0;
}

std::vector<int> PauliString::support(int n_qubits) const {
  std::vector<int> out;
  for (int q = 0; q < n_qubits; ++q)
    if ((x | z) & (1u << (n_qubits - 1 - q))) out.push_back(q);
  return out;
}

Matrix PauliString::matrix(int n_qubits) const {
  const Index dim = Index{1} << n_qubits;
  static const Complex powers[4] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
  const Complex phase = powers[std::popcount(x & z) & 3];
  Matrix m = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const double sign = parity(static_cast<std::uint64_t>(i) & z) ? -1.0 : 1.0;
    m(i ^ static_cast<Index>(x), i) = phase * sign;
  }
  return m;
}

SteaneCode::SteaneCode() {
  const char* supports[3] = {"IIIXXXX", "IXXIIXX", "XIXIXIX"};
  for (int k = 0; k < 3; ++k) {
    x_gens_[k] = PauliString::parse(supports[k]);
    z_gens_[k] = {0, x_gens_[k].x};
    gens_[k] = x_gens_[k];
    gens_[k + 3] = z_gens_[k];
  }
  const Index dim = Index{1} << kSteaneQubits;
  zero_ = Vector::Zero(dim);
  one_ = Vector::Zero(dim);
  const double amp = 1.0 / std::sqrt(8.0);
  for (int c = 0; c < 8; ++c) {
    std::uint32_t word = 0;
    for (int k = 0; k < 3; ++k)
      if (c & (1 << k)) word ^= x_gens_[k].x;
    zero_(word) = amp;
    one_(word ^ 0x7f) = amp;
  }
}

const SteaneCode& SteaneCode::get() {
  static const SteaneCode code;
  return code;
}

int SteaneCode::syndrome(const PauliString& e) const {
  int s = 0;
  for (int k = 0; k < kSteaneGenerators; ++k)
    if (!gens_[k].commutes_with(e)) s |= 1 << k;
  return s;
}

Vector encode_vector(const BlochVector& b) {
  const auto [alpha, beta] = bloch_amplitudes(b);
  const SteaneCode& code = SteaneCode::get();
  return alpha * code.logical_zero() + beta * code.logical_one();
}

DensityMatrix encode(const BlochVector& b) {
  const Vector v = encode_vector(b);
  return DensityMatrix::unchecked(v * v.adjoint());
}

namespace {

CorrectableSet build_correctable_set() {
  CorrectableSet set;
  set.errors.push_back({});
  for (char kind : {'X', 'Z', 'Y'})
    for (int q = 0; q < kSteaneQubits; ++q) {
      std::string s(kSteaneQubits, 'I');
      s[q] = kind;
      set.errors.push_back(PauliString::parse(s));
    }
  for (int i = 0; i < kSteaneQubits; ++i)
    for (int j = 0; j < kSteaneQubits; ++j) {
      if (i == j) continue;
      std::string s(kSteaneQubits, 'I');
      s[i] = 'X';
      s[j] = 'Z';
      set.errors.push_back(PauliString::parse(s));
    }

  const SteaneCode& code = SteaneCode::get();
  std::array<bool, kSyndromeCount> seen{};
  for (const auto& e : set.errors) {
    const int s = code.syndrome(e);
    if (seen[s]) throw std::logic_error("correctable errors share syndrome " + std::to_string(s));
    seen[s] = true;
    set.correction[s] = e;
  }
  return set;
}

std::vector<Matrix> build_projectors() {
  const SteaneCode& code = SteaneCode::get();
  const Index dim = Index{1} << kSteaneQubits;
  const Matrix id = Matrix::Identity(dim, dim);
  std::array<Matrix, kSteaneGenerators> g;
  for (int k = 0; k < kSteaneGenerators; ++k) g[k] = code.generators()[k].matrix();
  std::vector<Matrix> out;
  for (int s = 0; s < kSyndromeCount; ++s) {
    Matrix p = id;
    for (int k = 0; k < kSteaneGenerators; ++k) {
      const double sign = (s >> k) & 1 ? -1.0 : 1.0;
      p = (p * (id + sign * g[k]) * 0.5).eval();
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Keeps the blocks with equal Z-type syndrome and undoes the matching X
// error. Applied twice around a transversal Hadamard this is perfect EC,
// because the code is self-dual.
void correct_bit_flips(Matrix& m) {
  const SteaneCode& code = SteaneCode::get();
  const CorrectableSet& set = correctable_set();
  const Index dim = m.rows();
  std::vector<int> zsyn(dim);
  for (Index i = 0; i < dim; ++i) {
    int s = 0;
    for (int k = 0; k < 3; ++k) s |= parity(static_cast<std::uint64_t>(i) & code.z_generators()[k].z) << k;
    zsyn[i] = s;
  }
  std::array<Index, 8> flip{};
  for (int s = 0; s < 8; ++s) flip[s] = set.correction[s << 3].x;
  Matrix out = Matrix::Zero(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i)
      if (zsyn[i] == zsyn[j]) out(i ^ flip[zsyn[i]], j ^ flip[zsyn[i]]) += m(i, j);
  m = std::move(out);
}

void hadamard_all(Matrix& m) {
  for (int q = 0; q < kSteaneQubits; ++q) kernels::apply_unitary_1q(m, pauli::H(), q, kSteaneQubits);
}

void check_register(const DensityMatrix& rho) {
  if (rho.n_qubits() != kSteaneQubits)
    throw DimensionMismatch("expected a 7-qubit register, got " + std::to_string(rho.n_qubits()) + " qubits");
}

void apply_correction(Matrix& m, int syndrome) {
  const PauliString& c = correctable_set().correction[syndrome];
  kernels::conjugate_pauli(m, c.x, c.z);
}

}  // namespace

const CorrectableSet& correctable_set() {
  static const CorrectableSet set = build_correctable_set();
  return set;
}

const Matrix& CorrectableSet::projector(int s) const {
  static const std::vector<Matrix> projectors = build_projectors();
  if (s < 0 || s >= kSyndromeCount) throw InvalidInput("syndrome out of range");
  return projectors[s];
}

DensityMatrix perfect_ec(const DensityMatrix& rho) {
  check_register(rho);
  Matrix m = rho.matrix();
  correct_bit_flips(m);
  hadamard_all(m);
  correct_bit_flips(m);
  hadamard_all(m);
  return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix perfect_ec_reference(const DensityMatrix& rho) {
  check_register(rho);
  const CorrectableSet& set = correctable_set();
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (int s = 0; s < kSyndromeCount; ++s) {
    const Matrix c = set.correction[s].matrix() * set.projector(s);
    out += c * rho.matrix() * c.adjoint();
  }
  return DensityMatrix::unchecked(std::move(out));
}

namespace {

void check_generator(const PauliString& gen) {
  const bool pure_type = (gen.x == 0) != (gen.z == 0);
  if (gen.weight() != 4 || !pure_type)
    throw InvalidInput("faulty measurement needs a weight-4 X-type or Z-type generator, got " + gen.str());
}

Matrix4 controlled_pauli(bool x_type) {
  Matrix4 u = Matrix4::Identity();
  if (x_type) {
    u(2, 2) = u(3, 3) = 0.0;
    u(2, 3) = u(3, 2) = 1.0;
  } else {
    u(3, 3) = -1.0;
  }
  return u;
}

// Data-qubit map sigma -> Tr_anc[A N(x)N (U (|x><y| (x) sigma) U^dag)],
// ancilla first in the two-qubit ordering.
Matrix4 pair_map(int x, int y, const Matrix2& a, bool x_type, const std::vector<Matrix2>& noise) {
  const Matrix4 u = controlled_pauli(x_type);
  std::vector<Matrix4> pair_kraus;
  for (const auto& ka : noise)
    for (const auto& kd : noise) pair_kraus.push_back(kernels::kron(ka, kd));
  Matrix4 s = Matrix4::Zero();
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) {
      Matrix4 in = Matrix4::Zero();
      in(x * 2 + c, y * 2 + d) = 1.0;
      const Matrix4 gated = u * in * u.adjoint();
      Matrix4 noisy = Matrix4::Zero();
      for (const auto& k : pair_kraus) noisy += k * gated * k.adjoint();
      for (int e = 0; e < 2; ++e)
        for (int f = 0; f < 2; ++f) {
          Complex acc = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) acc += a(p, q) * noisy(q * 2 + e, p * 2 + f);
          s(e * 2 + f, c * 2 + d) = acc;
        }
    }
  return s;
}

// sum over (x, y) of the four-fold tensor power, in the row-major Liouville
// ordering of the 4-qubit support.
Matrix tensor_power_sum(const std::array<Matrix4, 4>& maps) {
  Matrix out = Matrix::Zero(256, 256);
  for (const auto& phi : maps) {
    for (Index row = 0; row < 256; ++row) {
      const Index a = row >> 4, b = row & 15;
      for (Index col = 0; col < 256; ++col) {
        const Index a2 = col >> 4, b2 = col & 15;
        Complex v = 1.0;
        for (int k = 0; k < 4; ++k) {
          const int sh = 3 - k;
          const Index r = ((a >> sh) & 1) * 2 + ((b >> sh) & 1);
          const Index c = ((a2 >> sh) & 1) * 2 + ((b2 >> sh) & 1);
          v *= phi(r, c);
          if (v == Complex(0.0)) break;
        }
        out(row, col) += v;
      }
    }
  }
  return out;
}

}  // namespace

std::vector<FaultyBranch> measure_generator_faulty(const DensityMatrix& rho, const PauliString& gen,
                                                   const KrausChannel& noise) {
  check_register(rho);
  check_generator(gen);
  if (noise.n_qubits() != 1) throw DimensionMismatch("gate noise must be a one-qubit channel");

  const int n = kSteaneQubits + 4;
  Matrix cat = Matrix::Zero(16, 16);
  cat(0, 0) = cat(0, 15) = cat(15, 0) = cat(15, 15) = 0.5;
  Matrix m = kernels::kron(rho.matrix(), cat);

  const bool x_type = gen.x != 0;
  const Matrix4 s = noise.superoperator();
  const auto support = gen.support();
  const Index dim_all = m.rows();
  for (int k = 0; k < 4; ++k) {
    const int anc = kSteaneQubits + k;
    const Index control = kernels::qubit_mask(n, anc), target = kernels::qubit_mask(n, support[k]);
    if (x_type) {
      // CNOT conjugation permutes basis indices.
      Matrix permuted(dim_all, dim_all);
      for (Index j = 0; j < dim_all; ++j) {
        const Index pj = (j & control) ? j ^ target : j;
        for (Index i = 0; i < dim_all; ++i) permuted((i & control) ? i ^ target : i, pj) = m(i, j);
      }
      m = std::move(permuted);
    } else {
      for (Index j = 0; j < dim_all; ++j) {
        const bool fj = (j & control) && (j & target);
        for (Index i = 0; i < dim_all; ++i)
          if (fj != ((i & control) && (i & target))) m(i, j) = -m(i, j);
      }
    }
    kernels::apply_superop_1q(m, s, support[k], n);
    kernels::apply_superop_1q(m, s, anc, n);
  }
  for (int k = 0; k < 4; ++k) kernels::apply_unitary_1q(m, pauli::H(), kSteaneQubits + k, n);

  std::vector<FaultyBranch> out;
  const Index dim = Index{1} << kSteaneQubits;
  for (int bit = 0; bit < 2; ++bit) {
    Matrix post = Matrix::Zero(dim, dim);
    for (Index t = 0; t < 16; ++t)
      if (parity(static_cast<std::uint64_t>(t)) == bit) post += m(Eigen::seqN(t, dim, 16), Eigen::seqN(t, dim, 16));
    FaultyBranch branch;
    branch.bit = bit;
    branch.probability = std::max(0.0, post.trace().real());
    if (branch.probability >= 1e-14) branch.state = DensityMatrix::unchecked(post / branch.probability);
    out.push_back(std::move(branch));
  }
  return out;
}

std::vector<GeneratorInstrument> faulty_instruments(const KrausChannel& noise) {
  if (noise.n_qubits() != 1) throw DimensionMismatch("gate noise must be a one-qubit channel");
  const auto kraus = as_2x2(noise);
  std::array<std::array<Matrix, 2>, 2> by_type;  // [x_type][outcome]
  std::array<Matrix, 2> totals;
  for (int x_type = 0; x_type < 2; ++x_type) {
    std::array<Matrix4, 4> plain, parity_weighted;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        plain[x * 2 + y] = pair_map(x, y, pauli::I(), x_type, kraus);
        parity_weighted[x * 2 + y] = pair_map(x, y, pauli::X(), x_type, kraus);
      }
    const Matrix t_i = tensor_power_sum(plain);
    const Matrix t_x = tensor_power_sum(parity_weighted);
    by_type[x_type][0] = 0.25 * (t_i + t_x);
    by_type[x_type][1] = 0.25 * (t_i - t_x);
    totals[x_type] = 0.5 * t_i;
  }
  std::vector<GeneratorInstrument> out;
  for (const auto& g : SteaneCode::get().generators()) {
    const int x_type = g.x != 0 ? 1 : 0;
    out.push_back({g.support(), by_type[x_type], totals[x_type]});
  }
  return out;
}

DensityMatrix faulty_ec(const DensityMatrix& rho, const KrausChannel& noise) {
  check_register(rho);
  const auto inst = faulty_instruments(noise);
  auto apply = [&](Matrix m, const Matrix& s, int g) {
    kernels::apply_superop(m, s, inst[g].support, kSteaneQubits);
    return m;
  };
  // Leaf s of the tree carries the unnormalised state for syndrome s.
  auto syndrome_tree = [&](const Matrix& start) {
    std::vector<Matrix> level{start};
    for (int g = 0; g < kSteaneGenerators; ++g) {
      std::vector<Matrix> next(level.size() * 2);
      for (std::size_t i = 0; i < level.size(); ++i)
        for (int b = 0; b < 2; ++b) next[i + b * level.size()] = apply(level[i], inst[g].outcome[b], g);
      level = std::move(next);
    }
    return level;
  };

  std::vector<Matrix> agree = syndrome_tree(rho.matrix());
  const Index dim = rho.dim();
  Matrix disagree = Matrix::Zero(dim, dim);
  for (int g = 0; g < kSteaneGenerators; ++g) {
    Matrix before = disagree;
    for (const auto& a : agree) before += a;
    Matrix after_agree = Matrix::Zero(dim, dim);
    for (int s = 0; s < kSyndromeCount; ++s) {
      agree[s] = apply(std::move(agree[s]), inst[g].outcome[(s >> g) & 1], g);
      after_agree += agree[s];
    }
    // Everything that left the agreeing branches at this generator, plus
    // whatever had already disagreed.
    disagree = apply(std::move(before), inst[g].total, g) - after_agree;
  }
  const std::vector<Matrix> third = syndrome_tree(disagree);

  Matrix out = Matrix::Zero(dim, dim);
  for (int s = 0; s < kSyndromeCount; ++s) {
    Matrix branch = agree[s] + third[s];
    apply_correction(branch, s);
    out += branch;
  }
  return DensityMatrix::unchecked(std::move(out));
}

double ec_fidelity(const DensityMatrix& psi, const DensityMatrix& rho) {
  check_register(psi);
  check_register(rho);
  if (psi.purity() < 1.0 - 1e-8) throw InvalidInput("ec_fidelity needs a pure codeword");
  const Matrix& p = psi.matrix();
  for (const auto& g : SteaneCode::get().generators()) {
    double expectation = 0.0;
    for (Index i = 0; i < p.rows(); ++i) {
      const Index j = i ^ static_cast<Index>(g.x);
      const double sign = parity(static_cast<std::uint64_t>(j) & g.z) ? -1.0 : 1.0;
      expectation += sign * p(j, i).real();
    }
    if (expectation < 1.0 - 1e-8) throw InvalidInput("ec_fidelity reference state is outside the codespace");
  }

  Index k = 0;
  p.diagonal().real().maxCoeff(&k);
  const Vector v = p.col(k) / std::sqrt(p(k, k).real());

  double total = 0.0;
  Vector e(v.size());
  for (const auto& err : correctable_set().errors) {
    for (Index i = 0; i < v.size(); ++i) {
      const double sign = parity(static_cast<std::uint64_t>(i) & err.z) ? -1.0 : 1.0;
      e(i ^ static_cast<Index>(err.x)) = sign * v(i);
    }
    total += e.dot(rho.matrix() * e).real();
  }
  return std::sqrt(std::clamp(total, 0.0, 1.0));
}

}  // namespace qecapprox
