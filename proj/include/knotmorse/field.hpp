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

#include <cmath>
#include <string>

#include "knotmorse/curve.hpp"
#include "knotmorse/error.hpp"
#include "knotmorse/quadrature.hpp"
#include "knotmorse/vec.hpp"

namespace knotmorse {

/// Phi(x) = int |r'(t)| / |x - r(t)| dt with unit line density, together
/// with its derivatives taken under the integral sign.
struct FieldSample {
  Vec3 x;
  double phi = 0;
  Vec3 grad;
  Mat3 hess;
  int nodes_used = 0;
  double est_error = 0;
  bool converged = true;

  Vec3 field() const { return -grad; }
};

enum FieldParts : unsigned {
  kPotential = 1u,
  kGradient = 2u,
  kHessian = 4u,
  kAllParts = 7u,
};

namespace detail {

struct FieldAccumulator {
  double phi = 0;
  Vec3 grad;
  double h[6] = {0, 0, 0, 0, 0, 0};  // xx yy zz xy xz yz
  double grad_scale = 0;
  double hess_scale = 0;

  FieldAccumulator& operator+=(const FieldAccumulator& o) {
    phi += o.phi;
    grad += o.grad;
    for (int i = 0; i < 6; ++i) h[i] += o.h[i];
    grad_scale += o.grad_scale;
    hess_scale += o.hess_scale;
    return *this;
  }
  FieldAccumulator operator*(double s) const {
    FieldAccumulator r = *this;
    r.phi *= s;
    r.grad *= s;
    for (double& v : r.h) v *= s;
    r.grad_scale *= s;
    r.hess_scale *= s;
    return r;
  }
  Mat3 hessian() const {
    Mat3 m;
    m(0, 0) = h[0];
    m(1, 1) = h[1];
    m(2, 2) = h[2];
    m(0, 1) = m(1, 0) = h[3];
    m(0, 2) = m(2, 0) = h[4];
    m(1, 2) = m(2, 1) = h[5];
    return m;
  }
};

// Frobenius norm of the kernel 3 d d^T / |d|^5 - I / |d|^3 is sqrt(6)/|d|^3.
inline constexpr double kSqrt6 = 2.449489742783178;

template <unsigned Parts>
inline void accumulate_node(FieldAccumulator& acc, const Vec3& x,
                            const KnotCurve::Node& node, double weight) {
  const Vec3 d = x - node.position;
  const double d2 = dot(d, d);
  const double inv = 1.0 / std::sqrt(d2);
  const double w = node.speed * weight;
  acc.phi += w * inv;
  if constexpr ((Parts & (kGradient | kHessian)) != 0) {
    const double inv3 = inv * inv * inv;
    if constexpr ((Parts & kGradient) != 0) {
      acc.grad -= (w * inv3) * d;
      acc.grad_scale += w * inv * inv;
    }
    if constexpr ((Parts & kHessian) != 0) {
      const double c5 = 3.0 * w * inv3 / d2;
      const double c3 = w * inv3;
      acc.h[0] += c5 * d.x * d.x - c3;
      acc.h[1] += c5 * d.y * d.y - c3;
      acc.h[2] += c5 * d.z * d.z - c3;
      acc.h[3] += c5 * d.x * d.y;
      acc.h[4] += c5 * d.x * d.z;
      acc.h[5] += c5 * d.y * d.z;
      acc.hess_scale += kSqrt6 * c3;
    }
  }
}

template <unsigned Parts>
FieldSample evaluate_field(const KnotCurve& k, const Vec3& x,
                           const QuadratureConfig& cfg) {
  const double amp = cfg.perturbation_amplitude;
  const Vec3 pc{cfg.perturbation_center[0], cfg.perturbation_center[1],
                cfg.perturbation_center[2]};
  const Vec3 pd{cfg.perturbation_direction[0], cfg.perturbation_direction[1],
                cfg.perturbation_direction[2]};
  auto node_sum = [&](long n, bool odd_only) {
    FieldAccumulator acc;
    const long step = odd_only ? 2 : 1;
    if (amp == 0) {
      for (long j = odd_only ? 1 : 0; j < n; j += step)
        accumulate_node<Parts>(acc, x, k.node(j, n), 1.0);
    } else {
      for (long j = odd_only ? 1 : 0; j < n; j += step) {
        const KnotCurve::Node nd = k.node(j, n);
        accumulate_node<Parts>(acc, x, nd,
                               1.0 + amp * dot(nd.position - pc, pd));
      }
    }
    return acc;
  };
  auto level_error = [](const FieldAccumulator& fine,
                        const FieldAccumulator& coarse) {
    double e = std::abs(fine.phi - coarse.phi) / std::abs(fine.phi);
    if constexpr ((Parts & kGradient) != 0)
      e = std::max(e, norm(fine.grad - coarse.grad) / fine.grad_scale);
    if constexpr ((Parts & kHessian) != 0) {
      double s = 0;
      for (int i = 0; i < 6; ++i) {
        const double di = fine.h[i] - coarse.h[i];
        s += (i < 3 ? 1.0 : 2.0) * di * di;
      }
      e = std::max(e, std::sqrt(s) / fine.hess_scale);
    }
    return e;
  };
  const QuadratureResult<FieldAccumulator> q =
      integrate_periodic<FieldAccumulator>(node_sum, level_error, cfg);
  FieldSample out;
  out.x = x;
  out.phi = q.value.phi;
  if constexpr ((Parts & kGradient) != 0) out.grad = q.value.grad;
  if constexpr ((Parts & kHessian) != 0) out.hess = q.value.hessian();
  out.nodes_used = q.nodes_used;
  out.est_error = q.est_error;
  out.converged = q.converged;
  return out;
}

}  // namespace detail

inline void check_evaluable(const KnotCurve& k, const Vec3& x) {
  if (!(std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(x.z)))
    throw Error(ErrorCode::kInvalidArgument, "point is not finite");
  const double d = k.distance_to(x);
  if (!(d > eval_floor(k)))
    throw Error(ErrorCode::kTooCloseToKnot,
                "distance " + std::to_string(d) + " is below the floor " +
                    std::to_string(eval_floor(k)));
}

/// Evaluates the requested parts; convergence is judged on those parts only.
/// Throws TooCloseToKnot inside the evaluation floor. A quadrature that hits
/// max_nodes returns its best estimate with `converged == false`.
inline FieldSample evaluate(const KnotCurve& k, const Vec3& x,
                            const QuadratureConfig& cfg, unsigned parts) {
  check_evaluable(k, x);
  switch (parts & kAllParts) {
    case kPotential: return detail::evaluate_field<kPotential>(k, x, cfg);
    case kPotential | kGradient:
    case kGradient:
      return detail::evaluate_field<kPotential | kGradient>(k, x, cfg);
    case kPotential | kHessian:
    case kHessian:
      return detail::evaluate_field<kPotential | kHessian>(k, x, cfg);
    default: return detail::evaluate_field<kAllParts>(k, x, cfg);
  }
}

inline FieldSample potential(const KnotCurve& k, const Vec3& x,
                             const QuadratureConfig& cfg = {}) {
  return evaluate(k, x, cfg, kPotential);
}

inline Vec3 gradient(const KnotCurve& k, const Vec3& x,
                     const QuadratureConfig& cfg = {}) {
  return evaluate(k, x, cfg, kGradient).grad;
}

inline Mat3 hessian(const KnotCurve& k, const Vec3& x,
                    const QuadratureConfig& cfg = {}) {
  return evaluate(k, x, cfg, kHessian).hess;
}

/// Potential, gradient and Hessian from one shared node set.
inline FieldSample field_sample(const KnotCurve& k, const Vec3& x,
                                const QuadratureConfig& cfg = {}) {
  return evaluate(k, x, cfg, kAllParts);
}

/// |trace H| / ||H||_F.
inline double harmonicity_defect(const Mat3& h) {
  const double f = h.frobenius();
  return f > 0 ? std::abs(h.trace()) / f : 0.0;
}

}  // namespace knotmorse
