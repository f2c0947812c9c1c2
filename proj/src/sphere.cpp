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

#include "qecapprox/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qecapprox {

std::vector<Eigen::Vector3d> fibonacci_sphere(int n) {
  if (n < 1) throw std::invalid_argument("fibonacci_sphere needs n >= 1");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

namespace {

// Nelder-Mead maximisation of f(normalize(p + a u + b v)) over (a, b).
SphereMaximum polish(const SphereFunction& f, const Eigen::Vector3d& start, double step) {
  Eigen::Vector3d u = start.unitOrthogonal();
  Eigen::Vector3d v = start.cross(u);
  auto point = [&](const Eigen::Vector2d& t) { return (start + t(0) * u + t(1) * v).normalized().eval(); };
  auto value = [&](const Eigen::Vector2d& t) { return f(point(t)); };

  std::array<Eigen::Vector2d, 3> simplex{Eigen::Vector2d(0, 0), Eigen::Vector2d(step, 0),
                                         Eigen::Vector2d(0, step)};
  std::array<double, 3> vals{value(simplex[0]), value(simplex[1]), value(simplex[2])};

  for (int iter = 0; iter < 400; ++iter) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] > vals[b]; });
    const int best = order[0], mid = order[1], worst = order[2];
    const double size = std::max((simplex[mid] - simplex[best]).norm(), (simplex[worst] - simplex[best]).norm());
    if (size < 1e-11 || std::abs(vals[best] - vals[worst]) <= 1e-16 * (1.0 + std::abs(vals[best]))) break;

    const Eigen::Vector2d centroid = 0.5 * (simplex[best] + simplex[mid]);
    const Eigen::Vector2d reflected = centroid + (centroid - simplex[worst]);
    const double fr = value(reflected);
    if (fr > vals[best]) {
      const Eigen::Vector2d expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = value(expanded);
      if (fe > fr) {
        simplex[worst] = expanded;
        vals[worst] = fe;
      } else {
        simplex[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr > vals[mid]) {
      simplex[worst] = reflected;
      vals[worst] = fr;
    } else {
      const Eigen::Vector2d contracted = centroid + 0.5 * (simplex[worst] - centroid);
      const double fc = value(contracted);
      if (fc > vals[worst]) {
        simplex[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (int k : {mid, worst}) {
          simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
          vals[k] = value(simplex[k]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  return {point(simplex[best]), vals[best]};
}

}  // namespace

std::vector<SphereMaximum> local_maxima_on_sphere(const SphereFunction& f, int lattice, int candidates) {
  const auto pts = fibonacci_sphere(lattice);
  std::vector<double> vals(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });

  const double spacing = std::sqrt(4.0 * std::numbers::pi / lattice);
  std::vector<Eigen::Vector3d> seeds;
  for (std::size_t idx : order) {
    if (static_cast<int>(seeds.size()) >= candidates) break;
    const bool near = std::any_of(seeds.begin(), seeds.end(), [&](const Eigen::Vector3d& s) {
      return (s - pts[idx]).norm() < 4.0 * spacing;
    });
    if (!near) seeds.push_back(pts[idx]);
  }

  std::vector<SphereMaximum> out;
  for (const auto& s : seeds) out.push_back(polish(f, s, spacing));
  std::sort(out.begin(), out.end(), [](const SphereMaximum& a, const SphereMaximum& b) { return a.value > b.value; });
  return out;
}

SphereMaximum maximize_on_sphere(const SphereFunction& f, int lattice, int candidates) {
  return local_maxima_on_sphere(f, lattice, candidates).front();
}

}  // namespace qecapprox
