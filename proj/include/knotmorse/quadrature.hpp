// Copyright 2026 The knotmorse Authors.
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

#include <limits>
#include <numbers>
#include <string>

#include "knotmorse/error.hpp"

namespace knotmorse {

struct QuadratureConfig {
  int initial_nodes = 64;
  int max_nodes = 1 << 20;
  double tolerance = 1e-10;
  /// Density 1 + amplitude * ((r(t) - center) . direction); zero amplitude is
  /// the physical uniform charge. Only the field module reads these.
  double perturbation_amplitude = 0;
  double perturbation_center[3] = {0, 0, 0};
  double perturbation_direction[3] = {0, 0, 1};

  void validate() const {
    if (initial_nodes < 16)
      throw Error(ErrorCode::kInvalidArgument, "initial_nodes must be >= 16");
    if (max_nodes < initial_nodes)
      throw Error(ErrorCode::kInvalidArgument,
                  "max_nodes must be >= initial_nodes");
    if (!(tolerance > 0))
      throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  }
};

template <class Value>
struct QuadratureResult {
  Value value{};
  int nodes_used = 0;
  double est_error = 0;
  bool converged = false;
};

/// Composite trapezoid rule on [0, 2*pi) with node doubling.
///
/// `node_sum(n, odd_only)` returns the sum of the integrand over the nodes
/// t_j = 2*pi*j/n, restricted to odd j when `odd_only` is set, so every
/// refinement reuses the previous level. `level_error(fine, coarse)` maps two
/// successive estimates to a relative error. The finer estimate is returned;
/// `est_error` is the difference to the previous level, which bounds the error
/// of the coarse level and overestimates the error of the fine one when the
/// integrand is analytic.
template <class Value, class NodeSum, class LevelError>
QuadratureResult<Value> integrate_periodic(NodeSum&& node_sum,
                                           LevelError&& level_error,
                                           const QuadratureConfig& cfg) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  int n = cfg.initial_nodes;
  Value sum = node_sum(n, false);
  Value coarse = sum * (kTwoPi / n);
  QuadratureResult<Value> out;
  out.est_error = std::numeric_limits<double>::infinity();
  while (true) {
    if (2 * static_cast<long long>(n) > cfg.max_nodes) {
      out.value = coarse;
      out.nodes_used = n;
      out.converged = false;
      return out;
    }
    sum += node_sum(2 * n, true);
    n *= 2;
    Value fine = sum * (kTwoPi / n);
    const double err = level_error(fine, coarse);
    out.value = fine;
    out.nodes_used = n;
    out.est_error = err;
    if (err < cfg.tolerance) {
      out.converged = true;
      return out;
    }
    coarse = fine;
  }
}

}  // namespace knotmorse
