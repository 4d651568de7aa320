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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "knotmorse/vec.hpp"

namespace knotmorse {

struct SymmetricEigen {
  std::array<double, 3> values{};   // ascending
  std::array<Vec3, 3> vectors{};    // orthonormal, vectors[i] <-> values[i]
};

namespace detail {

inline Vec3 eigenvector_from_rows(const Mat3& a, double value) {
  const Vec3 r0{a(0, 0) - value, a(0, 1), a(0, 2)};
  const Vec3 r1{a(0, 1), a(1, 1) - value, a(1, 2)};
  const Vec3 r2{a(0, 2), a(1, 2), a(2, 2) - value};
  const Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
  const double d01 = norm2(c01), d02 = norm2(c02), d12 = norm2(c12);
  if (d01 >= d02 && d01 >= d12) return c01 / std::sqrt(d01);
  if (d02 >= d12) return c02 / std::sqrt(d02);
  return c12 / std::sqrt(d12);
}

inline void orthogonal_complement(const Vec3& w, Vec3& u, Vec3& v) {
  if (std::abs(w.x) > std::abs(w.y)) {
    const double inv = 1.0 / std::sqrt(w.x * w.x + w.z * w.z);
    u = {-w.z * inv, 0.0, w.x * inv};
  } else {
    const double inv = 1.0 / std::sqrt(w.y * w.y + w.z * w.z);
    u = {0.0, w.z * inv, -w.y * inv};
  }
  v = cross(w, u);
}

// Eigenvector for `value` inside the plane orthogonal to `known`. The 2x2
// block in that plane is diagonalized by a Jacobi rotation, which stays
// accurate however close the two remaining eigenvalues are.
inline Vec3 eigenvector_in_complement(const Mat3& a, const Vec3& known,
                                      double value) {
  Vec3 u, v;
  orthogonal_complement(known, u, v);
  const Vec3 au = a * u, av = a * v;
  const double b00 = dot(u, au), b01 = dot(u, av), b11 = dot(v, av);
  const double phi = 0.5 * std::atan2(2.0 * b01, b00 - b11);
  const double c = std::cos(phi), s = std::sin(phi);
  const Vec3 first = c * u + s * v, second = c * v - s * u;
  const double l_first = b00 * c * c + 2.0 * b01 * c * s + b11 * s * s;
  const double l_second = b00 * s * s - 2.0 * b01 * c * s + b11 * c * c;
  return std::abs(l_first - value) <= std::abs(l_second - value) ? first : second;
}

}  // namespace detail

/// Closed-form (trigonometric) eigendecomposition of a symmetric 3x3 matrix.
/// The eigenvector of the most isolated eigenvalue comes from cross products
/// of rows of A - lambda I, the second from the orthogonal complement, the
/// third from a cross product, so repeated eigenvalues stay well defined.
inline SymmetricEigen symmetric_eigen(const Mat3& m) {
  SymmetricEigen out;
  const double max_abs =
      std::max({std::abs(m(0, 0)), std::abs(m(0, 1)), std::abs(m(0, 2)),
                std::abs(m(1, 1)), std::abs(m(1, 2)), std::abs(m(2, 2))});
  if (max_abs == 0) {
    out.vectors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    return out;
  }
  Mat3 a = m;
  a *= 1.0 / max_abs;
  const double q = a.trace() / 3.0;
  const double b00 = a(0, 0) - q, b11 = a(1, 1) - q, b22 = a(2, 2) - q;
  const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double p = std::sqrt((b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * off) / 6.0);
  if (p == 0) {
    out.values = {q * max_abs, q * max_abs, q * max_abs};
    out.vectors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    return out;
  }
  const double c00 = b11 * b22 - a(1, 2) * a(1, 2);
  const double c01 = a(0, 1) * b22 - a(1, 2) * a(0, 2);
  const double c02 = a(0, 1) * a(1, 2) - b11 * a(0, 2);
  const double det = (b00 * c00 - a(0, 1) * c01 + a(0, 2) * c02) / (p * p * p);
  const double half_det = std::clamp(0.5 * det, -1.0, 1.0);
  const double angle = std::acos(half_det) / 3.0;
  constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;
  const double beta2 = 2.0 * std::cos(angle);
  const double beta0 = 2.0 * std::cos(angle + kTwoThirdsPi);
  const double beta1 = -(beta0 + beta2);
  const double e0 = q + p * beta0, e1 = q + p * beta1, e2 = q + p * beta2;
  Vec3 v0, v1, v2;
  if (half_det >= 0) {
    v2 = detail::eigenvector_from_rows(a, e2);
    v1 = detail::eigenvector_in_complement(a, v2, e1);
    v0 = cross(v1, v2);
  } else {
    v0 = detail::eigenvector_from_rows(a, e0);
    v1 = detail::eigenvector_in_complement(a, v0, e1);
    v2 = cross(v0, v1);
  }
  // Rayleigh quotients recover the accuracy that acos loses near repeated
  // roots.
  std::array<std::pair<double, Vec3>, 3> pairs = {
      std::pair{dot(v0, a * v0), v0}, std::pair{dot(v1, a * v1), v1},
      std::pair{dot(v2, a * v2), v2}};
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  for (int i = 0; i < 3; ++i) {
    out.values[i] = pairs[i].first * max_abs;
    out.vectors[i] = pairs[i].second;
  }
  return out;
}

}  // namespace knotmorse
