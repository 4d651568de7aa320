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

// Slow reference implementations for tests. Nothing here calls into the
// field or critical modules: integrals use a fixed midpoint rule evaluated
// straight from the curve parametrization.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "knotmorse/curve.hpp"
#include "knotmorse/vec.hpp"

namespace knotmorse::oracle {

struct OracleConfig {
  long reference_nodes = 100000;
  long scan_nodes = 2048;
  double gradient_step_scale = 1e-5;  // h = scale * diameter
  double hessian_step_scale = 1e-4;
};

/// Potential of the unit circle on its axis: every point of the circle is at
/// distance sqrt(1 + z^2).
inline double circle_axis_potential(double z) {
  return 2.0 * std::numbers::pi / std::sqrt(1.0 + z * z);
}

/// Fixed midpoint rule for the potential.
inline double reference_potential(const KnotCurve& k, const Vec3& x,
                                  long nodes = 100000) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(nodes);
  double sum = 0;
  for (long i = 0; i < nodes; ++i) {
    const CurvePoint c = k.eval((static_cast<double>(i) + 0.5) * h);
    sum += norm(c.velocity) / norm(x - c.position);
  }
  return sum * h;
}

/// Fixed midpoint rule for the gradient kernel -(x - r) / |x - r|^3.
inline Vec3 reference_gradient(const KnotCurve& k, const Vec3& x, long nodes) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(nodes);
  Vec3 sum;
  for (long i = 0; i < nodes; ++i) {
    const CurvePoint c = k.eval((static_cast<double>(i) + 0.5) * h);
    const Vec3 d = x - c.position;
    const double r = norm(d);
    sum -= (norm(c.velocity) / (r * r * r)) * d;
  }
  return sum * h;
}

/// Central differences of reference_potential with step h.
inline Vec3 fd_gradient(const KnotCurve& k, const Vec3& x, double h,
                        const OracleConfig& cfg = {}) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (reference_potential(k, xp, cfg.reference_nodes) -
            reference_potential(k, xm, cfg.reference_nodes)) /
           (2 * h);
  }
  return g;
}

inline Vec3 fd_gradient(const KnotCurve& k, const Vec3& x,
                        const OracleConfig& cfg = {}) {
  return fd_gradient(k, x, cfg.gradient_step_scale * k.diameter(), cfg);
}

/// Second-order central differences of reference_potential with step h.
inline Mat3 fd_hessian(const KnotCurve& k, const Vec3& x, double h,
                       const OracleConfig& cfg = {}) {
  auto f = [&](const Vec3& p) {
    return reference_potential(k, p, cfg.reference_nodes);
  };
  Mat3 m;
  const double f0 = f(x);
  for (int a = 0; a < 3; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    m(a, a) = (f(xp) - 2 * f0 + f(xm)) / (h * h);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      Vec3 pp = x, pm = x, mp = x, mm = x;
      pp[a] += h, pp[b] += h;
      pm[a] += h, pm[b] -= h;
      mp[a] -= h, mp[b] += h;
      mm[a] -= h, mm[b] -= h;
      m(a, b) = m(b, a) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  return m;
}

inline Mat3 fd_hessian(const KnotCurve& k, const Vec3& x,
                       const OracleConfig& cfg = {}) {
  return fd_hessian(k, x, cfg.hessian_step_scale * k.diameter(), cfg);
}

struct Basin {
  Vec3 center;      // grid node with the smallest |grad Phi| in the basin
  Box neighborhood; // grid cells around the basin nodes, one spacing wide
  double min_grad = 0;
  int nodes = 0;
};

/// Local minima of |grad Phi| over an n^3 lattice spanning the search region
/// (endpoints included). A node qualifies when it is interior, all 26
/// neighbours lie outside the tube, and its value does not exceed any
/// neighbour's (up to a 1e-13 relative tie). Adjacent qualifying nodes merge
/// into one basin, which absorbs the ties that symmetric lattices produce.
inline std::vector<Basin> brute_scan(const KnotCurve& k, int n,
                                     double tube_radius,
                                     const OracleConfig& cfg = {}) {
  std::vector<Basin> basins;
  if (n < 3) return basins;
  const Box box = k.hull_box().padded(1e-6 * k.diameter());
  const Vec3 ext = box.extent();
  const Vec3 step{ext.x / (n - 1), ext.y / (n - 1), ext.z / (n - 1)};
  auto at = [&](int i, int j, int l) {
    return Vec3{box.lo.x + i * step.x, box.lo.y + j * step.y,
                box.lo.z + l * step.z};
  };
  auto flat = [n](int i, int j, int l) {
    return (static_cast<std::size_t>(i) * n + j) * n + l;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> value(static_cast<std::size_t>(n) * n * n, inf);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 p = at(i, j, l);
        if (k.distance_to(p) <= tube_radius) continue;
        value[flat(i, j, l)] = norm(reference_gradient(k, p, cfg.scan_nodes));
      }
  std::vector<char> is_min(value.size(), 0);
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j)
      for (int l = 1; l + 1 < n; ++l) {
        const double v = value[flat(i, j, l)];
        if (v == inf) continue;
        bool ok = true;
        for (int di = -1; di <= 1 && ok; ++di)
          for (int dj = -1; dj <= 1 && ok; ++dj)
            for (int dl = -1; dl <= 1 && ok; ++dl) {
              if (!di && !dj && !dl) continue;
              const double w = value[flat(i + di, j + dj, l + dl)];
              if (w == inf || v > w * (1 + 1e-13)) ok = false;
            }
        is_min[flat(i, j, l)] = ok;
      }
  std::vector<char> seen(value.size(), 0);
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j)
      for (int l = 1; l + 1 < n; ++l) {
        if (!is_min[flat(i, j, l)] || seen[flat(i, j, l)]) continue;
        Basin b;
        b.min_grad = inf;
        std::array<int, 3> lo{i, j, l}, hi{i, j, l};
        std::vector<std::array<int, 3>> stack{{i, j, l}};
        seen[flat(i, j, l)] = 1;
        while (!stack.empty()) {
          const auto c = stack.back();
          stack.pop_back();
          ++b.nodes;
          const double v = value[flat(c[0], c[1], c[2])];
          if (v < b.min_grad) {
            b.min_grad = v;
            b.center = at(c[0], c[1], c[2]);
          }
          for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], c[a]);
            hi[a] = std::max(hi[a], c[a]);
          }
          for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
              for (int dl = -1; dl <= 1; ++dl) {
                const int a = c[0] + di, bb = c[1] + dj, cc = c[2] + dl;
                if (a < 1 || bb < 1 || cc < 1 || a > n - 2 || bb > n - 2 ||
                    cc > n - 2)
                  continue;
                const std::size_t f = flat(a, bb, cc);
                if (is_min[f] && !seen[f]) {
                  seen[f] = 1;
                  stack.push_back({a, bb, cc});
                }
              }
        }
        b.neighborhood = {at(lo[0] - 1, lo[1] - 1, lo[2] - 1),
                          at(hi[0] + 1, hi[1] + 1, hi[2] + 1)};
        basins.push_back(b);
      }
  return basins;
}

}  // namespace knotmorse::oracle
