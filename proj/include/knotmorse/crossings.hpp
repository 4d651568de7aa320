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
#include <cmath>
#include <vector>

#include "knotmorse/curve.hpp"
#include "knotmorse/error.hpp"
#include "knotmorse/vec.hpp"

namespace knotmorse {

struct CrossingOptions {
  int segments = 2048;
  int max_retries = 6;
};

namespace detail {

struct ProjectedCrossing {
  double u = 0, w = 0;
};

// Counts transverse crossings of the closed polygon projected along `dir`.
// Returns -1 when the projection is degenerate (crossing at a vertex, near
// tangency, triple point, or a genuine 3D intersection).
inline int count_projected_crossings(const KnotCurve& k, const Vec3& dir,
                                     int segments) {
  const Vec3 d = normalized(dir);
  const Vec3 helper = std::abs(d.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = normalized(cross(d, helper));
  const Vec3 e2 = cross(d, e1);
  const int n = segments;
  std::vector<double> pu(n), pw(n), ph(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = k.eval(kTwoPi * i / n).position;
    pu[i] = dot(p, e1);
    pw[i] = dot(p, e2);
    ph[i] = dot(p, d);
  }
  const double scale = k.diameter();
  const double kEndpointEps = 1e-9;
  const double kAngleEps = 1e-6;
  std::vector<ProjectedCrossing> found;
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const int i1 = (i + 1) % n;
    const double ax = pu[i], ay = pw[i];
    const double rx = pu[i1] - ax, ry = pw[i1] - ay;
    const double minx = std::min(ax, pu[i1]), maxx = std::max(ax, pu[i1]);
    const double miny = std::min(ay, pw[i1]), maxy = std::max(ay, pw[i1]);
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const int j1 = (j + 1) % n;
      if (std::max(pu[j], pu[j1]) < minx || std::min(pu[j], pu[j1]) > maxx ||
          std::max(pw[j], pw[j1]) < miny || std::min(pw[j], pw[j1]) > maxy)
        continue;
      const double sx = pu[j1] - pu[j], sy = pw[j1] - pw[j];
      const double denom = rx * sy - ry * sx;
      const double qx = pu[j] - ax, qy = pw[j] - ay;
      const double lr = std::hypot(rx, ry), ls = std::hypot(sx, sy);
      if (std::abs(denom) <= kAngleEps * lr * ls) {
        // Parallel: only degenerate when the segments overlap.
        if (std::abs(qx * ry - qy * rx) <= kAngleEps * lr * std::hypot(qx, qy) + 1e-15 * scale)
          return -1;
        continue;
      }
      const double alpha = (qx * sy - qy * sx) / denom;
      const double beta = (qx * ry - qy * rx) / denom;
      if (alpha < -kEndpointEps || alpha > 1 + kEndpointEps ||
          beta < -kEndpointEps || beta > 1 + kEndpointEps)
        continue;
      if (alpha < kEndpointEps || alpha > 1 - kEndpointEps ||
          beta < kEndpointEps || beta > 1 - kEndpointEps)
        return -1;
      const double hi = ph[i] + alpha * (ph[i1] - ph[i]);
      const double hj = ph[j] + beta * (ph[j1] - ph[j]);
      if (std::abs(hi - hj) < 1e-9 * scale) return -1;
      const ProjectedCrossing c{ax + alpha * rx, ay + alpha * ry};
      for (const ProjectedCrossing& o : found)
        if (std::hypot(o.u - c.u, o.w - c.w) < 1e-7 * scale) return -1;
      found.push_back(c);
      ++count;
    }
  }
  return count;
}

}  // namespace detail

/// Crossings of the planar diagram obtained by projecting a dense polygonal
/// approximation of the knot along `direction`. Any diagram's crossing count
/// bounds the crossing number, and hence the tunnel number, from above.
/// Degenerate projections are retried with a jittered direction and doubled
/// density; DegenerateProjection is thrown when retries run out.
inline int crossing_upper_bound(const KnotCurve& k, const Vec3& direction,
                                const CrossingOptions& opt = {}) {
  if (!(norm(direction) > 0))
    throw Error(ErrorCode::kInvalidArgument, "projection direction is zero");
  Vec3 d = normalized(direction);
  int segments = opt.segments;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    const int c = detail::count_projected_crossings(k, d, segments);
    if (c >= 0) return c;
    const double j = 1e-3 * (attempt + 1);
    d = normalized(d + Vec3{j, -0.7 * j, 0.3 * j});
    segments *= 2;
  }
  throw Error(ErrorCode::kDegenerateProjection,
              "projection stays degenerate after retries");
}

/// Fixed direction used when none is given; chosen away from symmetry axes
/// of the sample torus knots.
inline Vec3 default_projection_direction() {
  return normalized(Vec3{0.1234, -0.0567, 0.9876});
}

}  // namespace knotmorse
