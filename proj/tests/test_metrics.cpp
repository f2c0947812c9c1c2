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

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>

#include <gtest/gtest.h>

#include "qecapprox/approx.hpp"
#include "qecapprox/metrics.hpp"
#include "qecapprox/steane.hpp"

namespace qecapprox {
namespace {

ChannelFamily adc_family() {
  return {"adc", [](double g) { return adc(g); }};
}

ChannelFamily pc_a_family() {
  return {"pc_a", [](double g) { return model_to_kraus(pauli_twirl(adc(g))); }};
}

TEST(Levels, Names) {
  for (Level l : {Level::Physical, Level::LogicalUncorrected, Level::LogicalPerfectEC, Level::LogicalFaultyEC})
    EXPECT_EQ(level_from_string(to_string(l)), l);
  EXPECT_THROW(level_from_string("logical"), InvalidInput);
  EXPECT_EQ(ec_mode_from_string("faulty"), EcMode::Faulty);
  EXPECT_THROW(ec_mode_from_string("noisy"), InvalidInput);
}

TEST(SampleStates, FibonacciLattice) {
  EXPECT_THROW(sample_bloch_states(0), InvalidInput);
  const auto one = sample_bloch_states(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].norm(), 1.0, 1e-12);

  const auto s = sample_bloch_states(80);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  std::set<std::tuple<double, double, double>> distinct;
  for (const auto& b : s) {
    EXPECT_NEAR(b.norm(), 1.0, 1e-12);
    mean += b.vec() / 80.0;
    distinct.insert({b.x, b.y, b.z});
  }
  EXPECT_EQ(distinct.size(), 80u);
  EXPECT_LT(mean.norm(), 0.05);
  for (const auto& b : sample_bloch_states(20)) EXPECT_NEAR(b.norm(), 1.0, 1e-12);

  const auto again = sample_bloch_states(80);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i].vec(), again[i].vec());
}

TEST(SampleStates, SeededRandomIsReproducible) {
  const auto a = sample_bloch_states_random(10, 42), b = sample_bloch_states_random(10, 42);
  const auto c = sample_bloch_states_random(10, 43);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(a[i].vec(), b[i].vec());
    EXPECT_NEAR(a[i].norm(), 1.0, 1e-12);
  }
  EXPECT_NE(a[0].vec(), c[0].vec());
}

TEST(LogGrid, Endpoints) {
  const auto g = log_grid(1e-3, 0.5, 30);
  ASSERT_EQ(g.size(), 30u);
  EXPECT_EQ(g.front(), 1e-3);
  EXPECT_EQ(g.back(), 0.5);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), InvalidInput);
  EXPECT_THROW(log_grid(0.1, 0.01, 5), InvalidInput);
}

TEST(EvaluateLevel, NoNoiseMeansNoDistance) {
  const BlochVector b{0.6, 0.0, 0.8};
  for (Level l : {Level::Physical, Level::LogicalUncorrected, Level::LogicalPerfectEC, Level::LogicalFaultyEC})
    EXPECT_NEAR(evaluate_level(l, adc(0.0), b).d_honesty, 0.0, 1e-10) << to_string(l);
}

TEST(EvaluateLevel, PhysicalAmplitudeDampingClosedForm) {
  // Bloch displacement (M - I) r + c for the damping map, halved.
  const double g = 0.01;
  for (const auto& b : sample_bloch_states(20)) {
    const double s = std::sqrt(1 - g) - 1;
    const Eigen::Vector3d d(s * b.x, s * b.y, g * (1 - b.z));
    EXPECT_NEAR(evaluate_level(Level::Physical, adc(g), b).d_honesty, d.norm() / 2, 1e-12);
  }
}

TEST(EvaluateLevel, DistancesInUnitInterval) {
  for (Level l : {Level::Physical, Level::LogicalUncorrected, Level::LogicalPerfectEC})
    for (const auto& b : sample_bloch_states(6)) {
      const double d = evaluate_level(l, adc(0.3), b).d_honesty;
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
    }
}

TEST(EvaluateLevel, PerfectEcSuppressesFirstOrder) {
  const BlochVector b{0, 0, -1};
  const double d1 = evaluate_level(Level::LogicalPerfectEC, adc(1e-3), b).d_honesty;
  const double d2 = evaluate_level(Level::LogicalPerfectEC, adc(2e-3), b).d_honesty;
  EXPECT_NEAR(d2 / d1, 4.0, 0.05);
}

TEST(Accuracy, SelfIsZero) {
  const BlochVector b{0, 1, 0};
  for (Level l : {Level::Physical, Level::LogicalUncorrected, Level::LogicalPerfectEC})
    EXPECT_NEAR(accuracy_at_level(l, adc(0.1), adc(0.1), b), 0.0, 1e-12);
  const auto twirl = pauli_twirl(pol_channel(0.3, 0.1));
  EXPECT_EQ(accuracy_at_level(Level::Physical, pol_channel(0.3, 0.1), twirl, b),
            accuracy_at_level(Level::Physical, pol_channel(0.3, 0.1), model_to_kraus(twirl), b));
}

TEST(LeadingCoefficient, ExactPolynomials) {
  const auto g = log_grid(1e-4, 1e-2, 8);
  std::vector<double> lin, quad;
  for (double e : g) {
    lin.push_back(2 * e);
    quad.push_back(3 * e * e);
  }
  const auto a = leading_coefficient(g, lin, 1);
  EXPECT_NEAR(a.coefficient, 2.0, 1e-9);
  EXPECT_LT(a.residual, 1e-12);
  EXPECT_TRUE(a.accepted);
  EXPECT_NEAR(leading_coefficient(g, quad, 2).coefficient, 3.0, 1e-6);
}

TEST(LeadingCoefficient, SeparatesOrders) {
  const auto g = log_grid(1e-4, 1e-2, 8);
  std::vector<double> v;
  for (double e : g) v.push_back(0.5 * e + 40 * e * e);
  EXPECT_NEAR(leading_coefficient(g, v, 1).coefficient, 0.5, 1e-6);
  std::vector<double> w;
  for (double e : g) w.push_back(5 * e * e + 100 * e * e * e);
  EXPECT_NEAR(leading_coefficient(g, w, 2).coefficient, 5.0, 1e-6);
}

TEST(LeadingCoefficient, Gates) {
  const auto g = log_grid(1e-4, 1e-2, 8);
  EXPECT_EQ(leading_coefficient(g, std::vector<double>(8, 0.0), 1).coefficient, 0.0);
  std::vector<double> sparse(8, 0.0);
  sparse[7] = 1e-3;
  EXPECT_FALSE(leading_coefficient(g, sparse, 1).accepted);
  std::vector<double> noisy;
  for (std::size_t i = 0; i < g.size(); ++i) noisy.push_back(g[i] * (i % 2 ? 3.0 : 0.2));
  EXPECT_FALSE(leading_coefficient(g, noisy, 1).accepted);
  EXPECT_THROW(leading_coefficient(g, std::vector<double>(3, 1.0), 1), InvalidInput);
}

TEST(SummarizeCoefficients, PopulationStd) {
  const auto g = log_grid(1e-4, 1e-2, 6);
  Eigen::MatrixXd v(2, 6);
  for (int j = 0; j < 6; ++j) {
    v(0, j) = 1.0 * g[j];
    v(1, j) = 3.0 * g[j];
  }
  const auto s = summarize_coefficients(g, v, 1);
  EXPECT_NEAR(s.mean, 2.0, 1e-9);
  EXPECT_NEAR(s.std, 1.0, 1e-9);
  EXPECT_EQ(s.accepted, 2);
}

TEST(Sweep, ShapesAndOrderIndependence) {
  const auto states = sample_bloch_states(5);
  const auto grid = log_grid(1e-3, 1e-1, 5);
  const auto serial = sweep_level(Level::LogicalUncorrected, adc_family(), {pc_a_family()}, states, grid, 1);
  const auto threaded = sweep_level(Level::LogicalUncorrected, adc_family(), {pc_a_family()}, states, grid, 4);
  ASSERT_EQ(serial.size(), 2u);
  EXPECT_EQ(serial[0].channel_id, "adc");
  EXPECT_EQ(serial[1].channel_id, "pc_a");
  EXPECT_EQ(serial[0].honesty.rows(), 5);
  EXPECT_EQ(serial[0].honesty.cols(), 5);
  EXPECT_LT(serial[0].accuracy.norm(), 1e-12);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_EQ(serial[c].honesty, threaded[c].honesty);
    EXPECT_EQ(serial[c].accuracy, threaded[c].accuracy);
    EXPECT_GE(serial[c].honesty.minCoeff(), 0.0);
    EXPECT_LE(serial[c].honesty.maxCoeff(), 1.0);
  }
  EXPECT_THROW(sweep_level(Level::Physical, adc_family(), {}, states, {0.1, 0.01}), InvalidInput);
}

TEST(Tabulate, LooksUpGridPoints) {
  std::atomic<int> calls{0};
  ChannelFamily f{"adc", [&](double g) {
                    ++calls;
                    return adc(g);
                  }};
  const auto t = tabulate(f, {0.1, 0.2}, 2);
  EXPECT_EQ(calls.load(), 2);
  EXPECT_EQ(t.at(0.2).superoperator(), adc(0.2).superoperator());
  EXPECT_EQ(calls.load(), 2);
  t.at(0.3);
  EXPECT_EQ(calls.load(), 3);
}

TEST(Pseudothreshold, CrossingBracketsTheSignChange) {
  const auto grid = log_grid(1e-3, 0.5, 30);
  int crossed = 0;
  for (const auto& b : sample_bloch_states(6)) {
    const auto t = pseudothreshold(adc_family(), adc_family(), EcMode::Perfect, b, grid);
    if (!t) continue;
    ++crossed;
    EXPECT_GT(*t, grid.front());
    EXPECT_LT(*t, grid.back());
    const auto psi = encode(b);
    auto gap = [&](double g) {
      return ec_fidelity(psi, apply_transversal(psi, adc(g))) -
             fidelity_pure(pure_state(b), apply_channel(pure_state(b), adc(g), {0}));
    };
    EXPECT_LT(gap(*t * 0.9) * gap(*t * 1.1), 0.0);
  }
  EXPECT_GT(crossed, 0);
  EXPECT_THROW(pseudothreshold(adc_family(), adc_family(), EcMode::Perfect, {0, 0, 1}, log_grid(1e-3, 0.5, 5)),
               InvalidInput);
}

TEST(Pseudothreshold, NoCrossingIsReported) {
  ChannelFamily clean{"id", [](double) { return KrausChannel::identity(); }};
  EXPECT_FALSE(pseudothreshold(clean, clean, EcMode::Perfect, {1, 0, 0}, log_grid(1e-3, 0.5, 10)).has_value());
}

TEST(ThresholdSummary, Statistics) {
  const std::vector<std::optional<double>> a{0.1, 0.2, 0.3}, b{0.15, 0.25, 0.35};
  const auto same = threshold_summary("a", a, a);
  EXPECT_NEAR(same.mean, 0.2, 1e-15);
  EXPECT_NEAR(same.std, std::sqrt(2.0 / 3) * 0.1, 1e-15);
  EXPECT_EQ(same.rms_vs_target, 0.0);
  EXPECT_NEAR(threshold_summary("b", a, b).rms_vs_target, 0.05, 1e-15);

  const std::vector<std::optional<double>> c{0.1, std::nullopt, 0.3};
  const auto r = threshold_summary("c", a, c);
  EXPECT_EQ(r.missing, 1);
  EXPECT_NEAR(r.mean, 0.2, 1e-15);
  EXPECT_THROW(threshold_summary("d", a, {0.1}), InvalidInput);
}

TEST(ParallelFor, CoversEveryIndexAndPropagatesErrors) {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](int i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](int i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace qecapprox
