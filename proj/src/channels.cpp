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

#include "qecapprox/channels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <tuple>

namespace qecapprox {
namespace pauli {

const Matrix2& I() {
  static const Matrix2 m = Matrix2::Identity();
  return m;
}
const Matrix2& X() {
  static const Matrix2 m = (Matrix2() << 0, 1, 1, 0).finished();
  return m;
}
const Matrix2& Y() {
  static const Matrix2 m = (Matrix2() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  return m;
}
const Matrix2& Z() {
  static const Matrix2 m = (Matrix2() << 1, 0, 0, -1).finished();
  return m;
}
const Matrix2& H() {
  static const Matrix2 m = (Matrix2() << 1, 1, 1, -1).finished() / std::sqrt(2.0);
  return m;
}
const Matrix2& S() {
  static const Matrix2 m = (Matrix2() << 1, 0, 0, Complex(0, 1)).finished();
  return m;
}
const std::array<Matrix2, 4>& basis() {
  static const std::array<Matrix2, 4> b{I(), X(), Y(), Z()};
  return b;
}

}  // namespace pauli

KrausChannel adc(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidInput("ADC damping strength must lie in [0, 1]");
  Matrix e0 = Matrix::Zero(2, 2), e1 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - gamma);
  e1(0, 1) = std::sqrt(gamma);
  return KrausChannel({e0, e1});
}

KrausChannel pol_channel(double phi, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("polarisation strength must lie in [0, 1]");
  const Matrix e0 = std::sqrt(1.0 - p) * Matrix::Identity(2, 2);
  const Matrix e1 = std::sqrt(p) * (std::cos(phi) * pauli::X() + std::sin(phi) * pauli::Y());
  return KrausChannel({e0, e1});
}

Matrix2 canonical_phase(const Matrix2& u) {
  // Row-major scan: (0,0), (0,1), (1,0), (1,1).
  const std::array<Complex, 4> entries{u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
  for (const Complex& e : entries)
    if (std::abs(e) > 1e-12) return u * (std::abs(e) / e);
  return u;
}

namespace {

std::array<double, 8> sort_key(const Matrix2& u) {
  auto r = [](double v) { return std::round(v * 1e9) / 1e9; };
  return {r(u(0, 0).real()), r(u(0, 0).imag()), r(u(0, 1).real()), r(u(0, 1).imag()),
          r(u(1, 0).real()), r(u(1, 0).imag()), r(u(1, 1).real()), r(u(1, 1).imag())};
}

std::vector<Matrix2> build_clifford_group() {
  std::vector<Matrix2> group{canonical_phase(pauli::I())};
  std::deque<Matrix2> frontier{group.front()};
  const std::array<Matrix2, 2> gens{pauli::H(), pauli::S()};
  while (!frontier.empty()) {
    const Matrix2 u = frontier.front();
    frontier.pop_front();
    for (const auto& g : gens) {
      const Matrix2 v = canonical_phase(g * u);
      const bool known = std::any_of(group.begin(), group.end(), [&](const Matrix2& w) {
        return (w - v).cwiseAbs().maxCoeff() < 1e-9;
      });
      if (!known) {
        group.push_back(v);
        frontier.push_back(v);
      }
    }
  }
  std::sort(group.begin(), group.end(),
            [](const Matrix2& a, const Matrix2& b) { return sort_key(a) < sort_key(b); });
  return group;
}

Vector ket(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

const std::vector<Matrix2>& clifford_group() {
  static const std::vector<Matrix2> group = build_clifford_group();
  return group;
}

const std::vector<TranslationPair>& translation_pairs() {
  static const std::vector<TranslationPair> pairs = [] {
    const double h = 1.0 / std::sqrt(2.0);
    const Complex i(0, 1);
    struct Spec {
      const char* label;
      Vector state, perp;
      BlochVector bloch;
    };
    const std::vector<Spec> specs{
        {"0", ket(1, 0), ket(0, 1), {0, 0, 1}},
        {"1", ket(0, 1), ket(1, 0), {0, 0, -1}},
        {"+", ket(h, h), ket(h, -h), {1, 0, 0}},
        {"-", ket(h, -h), ket(h, h), {-1, 0, 0}},
        {"+i", ket(h, h * i), ket(h, -h * i), {0, 1, 0}},
        {"-i", ket(h, -h * i), ket(h, h * i), {0, -1, 0}},
    };
    std::vector<TranslationPair> out;
    for (const auto& s : specs)
      out.push_back({s.label, s.state * s.state.adjoint(), s.state * s.perp.adjoint(), s.bloch});
    return out;
  }();
  return pairs;
}

std::string_view to_string(SetKind kind) {
  switch (kind) {
    case SetKind::PC: return "PC";
    case SetKind::CC: return "CC";
    case SetKind::PMC: return "PMC";
    case SetKind::CMC: return "CMC";
    case SetKind::DC: return "DC";
  }
  return "?";
}

SetKind set_kind_from_string(std::string_view s) {
  for (SetKind k : {SetKind::PC, SetKind::CC, SetKind::PMC, SetKind::CMC, SetKind::DC})
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown operation set '" + std::string(s) + "'");
}

OperationSet OperationSet::make(SetKind kind) {
  OperationSet set;
  set.kind_ = kind;
  const bool cliffords = kind == SetKind::CC || kind == SetKind::CMC;
  const bool translations = kind == SetKind::PMC || kind == SetKind::CMC;
  if (cliffords) {
    int idx = 0;
    for (const auto& u : clifford_group()) set.elements_.push_back({"C" + std::to_string(idx++), {u}});
  } else {
    const char* names[] = {"I", "X", "Y", "Z"};
    for (int k = 0; k < 4; ++k) set.elements_.push_back({names[k], {pauli::basis()[k]}});
  }
  if (translations)
    for (const auto& t : translation_pairs()) set.elements_.push_back({"T" + t.label, {t.project, t.flip}});
  return set;
}

void ChannelModel::validate() const {
  if (static_cast<std::size_t>(probs.size()) != set.size())
    throw InvalidInput("probability vector has " + std::to_string(probs.size()) + " entries, set has " +
                       std::to_string(set.size()));
  if (probs.size() > 0 && probs.minCoeff() < -1e-12) throw InvalidInput("negative probability in model");
  if (std::abs(probs.sum() - 1.0) > 1e-10) throw InvalidInput("model probabilities do not sum to 1");
  if (set.tied_paulis() && (std::abs(probs(1) - probs(2)) > 1e-10 || std::abs(probs(1) - probs(3)) > 1e-10))
    throw InvalidInput("DC model needs equal X, Y, Z weights");
}

ChannelModel make_model(SetKind kind, Eigen::VectorXd probs) {
  ChannelModel m{OperationSet::make(kind), std::move(probs)};
  m.validate();
  return m;
}

ChannelModel depolarizing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("depolarizing strength must lie in [0, 1]");
  Eigen::VectorXd probs(4);
  probs << 1.0 - p, p / 3.0, p / 3.0, p / 3.0;
  return make_model(SetKind::DC, probs);
}

KrausChannel model_to_kraus(const ChannelModel& m) {
  m.validate();
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < m.set.size(); ++i) {
    const double w = std::sqrt(std::max(0.0, m.probs(static_cast<Index>(i))));
    for (const auto& k : m.set.elements()[i].kraus) ops.push_back(w * k);
  }
  return KrausChannel(std::move(ops));
}

std::vector<Matrix2> as_2x2(const KrausChannel& ch) {
  if (ch.n_qubits() != 1) throw DimensionMismatch("expected a one-qubit channel");
  std::vector<Matrix2> out;
  for (const auto& k : ch.operators()) out.emplace_back(k);
  return out;
}

ProcessMatrix process_matrix(const std::vector<Matrix2>& kraus) {
  ProcessMatrix pm{Matrix4::Zero()};
  for (const auto& k : kraus) {
    Eigen::Vector4cd a;
    for (int m = 0; m < 4; ++m) a(m) = 0.5 * (pauli::basis()[m] * k).trace();
    pm.chi.noalias() += a * a.adjoint();
  }
  return pm;
}

ProcessMatrix process_matrix(const KrausChannel& ch) { return process_matrix(as_2x2(ch)); }

Matrix2 apply_process(const ProcessMatrix& pm, const Matrix2& rho) {
  Matrix2 out = Matrix2::Zero();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      out += pm.chi(m, n) * pauli::basis()[m] * rho * pauli::basis()[n].adjoint();
  return out;
}

BlochAffineMap bloch_affine_map(const std::vector<Matrix2>& kraus) {
  auto channel = [&](const Matrix2& rho) {
    Matrix2 out = Matrix2::Zero();
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
  };
  BlochAffineMap map;
  const Matrix2 image_of_identity = channel(pauli::I());
  for (int i = 0; i < 3; ++i) {
    const Matrix2& si = pauli::basis()[i + 1];
    map.c(i) = 0.5 * (si * image_of_identity).trace().real();
    for (int j = 0; j < 3; ++j) map.m(i, j) = 0.5 * (si * channel(pauli::basis()[j + 1])).trace().real();
  }
  return map;
}

BlochAffineMap bloch_affine_map(const KrausChannel& ch) { return bloch_affine_map(as_2x2(ch)); }

double average_fidelity_to_identity(const KrausChannel& ch) {
  const double n = static_cast<double>(Index{1} << ch.n_qubits());
  double acc = 0.0;
  for (const auto& k : ch.operators()) acc += std::norm(k.trace());
  return acc / (n * n);
}

}  // namespace qecapprox
