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

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qecapprox {

/// n near-uniform unit vectors: z_i = 1 - (2i+1)/n, azimuth i * golden angle.
std::vector<Eigen::Vector3d> fibonacci_sphere(int n);

struct SphereMaximum {
  Eigen::Vector3d direction;
  double value;
};

using SphereFunction = std::function<double(const Eigen::Vector3d&)>;

/// Scan a Fibonacci lattice, then polish up to `candidates` well-separated
/// lattice maxima with Nelder-Mead in a local tangent chart. Results are
/// sorted by value, best first.
std::vector<SphereMaximum> local_maxima_on_sphere(const SphereFunction& f, int lattice, int candidates);

SphereMaximum maximize_on_sphere(const SphereFunction& f, int lattice = 10000, int candidates = 8);

}  // namespace qecapprox
