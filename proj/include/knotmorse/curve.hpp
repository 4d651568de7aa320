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
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "knotmorse/error.hpp"
#include "knotmorse/quadrature.hpp"
#include "knotmorse/vec.hpp"

namespace knotmorse {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Pairs of parameters closer than this (in angle, mod 2*pi) are neighbours
/// along the curve and never count as a self-approach.
inline constexpr double kSelfDistanceCut = 0.5;

/// ((R + r cos qt) cos pt, (R + r cos qt) sin pt, r sin qt). The pair
/// (p, q) = (1, 0) is the round circle of radius R in the xy-plane.
struct TorusKnot {
  int p = 2;
  int q = 3;
  double major_radius = 2.0;
  double minor_radius = 1.0;
};

/// Harmonic k (1-based) contributes a*cos(kt) + b*sin(kt) per axis; each
/// entry is {ax, bx, ay, by, az, bz}.
struct FourierKnot {
  std::vector<std::array<double, 6>> harmonics;
};

/// Closed periodic cubic spline through `points` at uniform parameter spacing.
struct SampledKnot {
  std::vector<Vec3> points;
  std::vector<Vec3> second_derivatives;
};

struct CurvePoint {
  Vec3 position;
  Vec3 velocity;
};

struct SelfDistance {
  double distance = 0;
  double s = 0;
  double t = 0;
  bool intersecting = false;
};

struct TubeSpec {
  double radius = 0;
};

enum class Validation { kOn, kOff };

namespace detail {

inline double reduce_angle(double t) {
  double r = t - kTwoPi * std::floor(t / kTwoPi);
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

inline double angular_separation(double s, double t) {
  double d = std::abs(reduce_angle(s) - reduce_angle(t));
  return std::min(d, kTwoPi - d);
}

struct Evaluator {
  CurvePoint operator()(const TorusKnot& k, double t) const {
    const double p = k.p, q = k.q;
    const double cq = std::cos(q * t), sq = std::sin(q * t);
    const double cp = std::cos(p * t), sp = std::sin(p * t);
    const double rho = k.major_radius + k.minor_radius * cq;
    const double drho = -k.minor_radius * q * sq;
    return {{rho * cp, rho * sp, k.minor_radius * sq},
            {drho * cp - p * rho * sp, drho * sp + p * rho * cp,
             k.minor_radius * q * cq}};
  }
  CurvePoint operator()(const FourierKnot& k, double t) const {
    CurvePoint out;
    for (std::size_t i = 0; i < k.harmonics.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      const double c = std::cos(n * t), s = std::sin(n * t);
      const auto& h = k.harmonics[i];
      for (int a = 0; a < 3; ++a) {
        out.position[a] += h[2 * a] * c + h[2 * a + 1] * s;
        out.velocity[a] += n * (-h[2 * a] * s + h[2 * a + 1] * c);
      }
    }
    return out;
  }
  CurvePoint operator()(const SampledKnot& k, double t) const {
    const std::size_t n = k.points.size();
    const double h = kTwoPi / static_cast<double>(n);
    std::size_t i = static_cast<std::size_t>(t / h);
    if (i >= n) i = n - 1;
    const std::size_t j = (i + 1) % n;
    const double a = (static_cast<double>(i + 1) * h - t) / h;
    const double b = 1.0 - a;
    const Vec3& yi = k.points[i];
    const Vec3& yj = k.points[j];
    const Vec3& mi = k.second_derivatives[i];
    const Vec3& mj = k.second_derivatives[j];
    const double h2 = h * h / 6.0;
    return {a * yi + b * yj + ((a * a * a - a) * h2) * mi +
                ((b * b * b - b) * h2) * mj,
            (yj - yi) / h - ((3 * a * a - 1) * h / 6.0) * mi +
                ((3 * b * b - 1) * h / 6.0) * mj};
  }
};

struct Accelerator {
  Vec3 operator()(const TorusKnot& k, double t) const {
    const double p = k.p, q = k.q;
    const double cq = std::cos(q * t), sq = std::sin(q * t);
    const double cp = std::cos(p * t), sp = std::sin(p * t);
    const double rho = k.major_radius + k.minor_radius * cq;
    const double d1 = -k.minor_radius * q * sq;
    const double d2 = -k.minor_radius * q * q * cq;
    return {d2 * cp - 2 * p * d1 * sp - p * p * rho * cp,
            d2 * sp + 2 * p * d1 * cp - p * p * rho * sp,
            -k.minor_radius * q * q * sq};
  }
  Vec3 operator()(const FourierKnot& k, double t) const {
    Vec3 out;
    for (std::size_t i = 0; i < k.harmonics.size(); ++i) {
      const double n = static_cast<double>(i + 1);
      const double c = std::cos(n * t), s = std::sin(n * t);
      const auto& h = k.harmonics[i];
      for (int a = 0; a < 3; ++a)
        out[a] -= n * n * (h[2 * a] * c + h[2 * a + 1] * s);
    }
    return out;
  }
  Vec3 operator()(const SampledKnot& k, double t) const {
    const std::size_t n = k.points.size();
    const double h = kTwoPi / static_cast<double>(n);
    std::size_t i = static_cast<std::size_t>(t / h);
    if (i >= n) i = n - 1;
    const double a = (static_cast<double>(i + 1) * h - t) / h;
    return a * k.second_derivatives[i] +
           (1.0 - a) * k.second_derivatives[(i + 1) % n];
  }
};

// Periodic cubic spline moments: M[i-1] + 4 M[i] + M[i+1] = 6 D2 y / h^2.
// The circulant system is strictly diagonally dominant, so Jacobi sweeps
// contract by 1/2 each.
inline std::vector<Vec3> spline_moments(const std::vector<Vec3>& y) {
  const std::size_t n = y.size();
  const double h = kTwoPi / static_cast<double>(n);
  std::vector<Vec3> rhs(n), m(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& prev = y[(i + n - 1) % n];
    const Vec3& nxt = y[(i + 1) % n];
    rhs[i] = (6.0 / (h * h)) * (nxt - 2.0 * y[i] + prev);
    m[i] = rhs[i] / 6.0;
  }
  for (int sweep = 0; sweep < 200; ++sweep) {
    double change = 0, scale = 0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = (rhs[i] - m[(i + n - 1) % n] - m[(i + 1) % n]) / 4.0;
      change = std::max(change, norm(next[i] - m[i]));
      scale = std::max(scale, norm(next[i]));
    }
    m.swap(next);
    if (change <= 1e-16 * std::max(scale, 1e-300)) break;
  }
  return m;
}

}  // namespace detail

/// Immutable parametrized knot r(t), t in [0, 2*pi], with cached geometry.
class KnotCurve {
 public:
  using Kind = std::variant<TorusKnot, FourierKnot, SampledKnot>;

  struct Node {
    Vec3 position;
    double speed = 0;
  };

  /// Size of the precomputed node table; dyadic quadrature levels up to this
  /// size read from it instead of re-evaluating the curve.
  static constexpr long kTableSize = 1L << 15;
  static constexpr long kCoarseSamples = 1024;

  KnotCurve(Kind kind, std::string label, Validation validation)
      : kind_(std::move(kind)), label_(std::move(label)) {
    build_table();
    compute_geometry();
    if (validation == Validation::kOn) validate();
  }

  const Kind& kind() const { return kind_; }
  const std::string& label() const { return label_; }

  /// Position and exact (analytic or spline) velocity; t is reduced mod 2*pi.
  CurvePoint eval(double t) const {
    const double tr = detail::reduce_angle(t);
    return std::visit([tr](const auto& k) { return detail::Evaluator{}(k, tr); },
                      kind_);
  }
  Vec3 acceleration(double t) const {
    const double tr = detail::reduce_angle(t);
    return std::visit(
        [tr](const auto& k) { return detail::Accelerator{}(k, tr); }, kind_);
  }

  /// Position and speed at t_j = 2*pi*j/n.
  Node node(long j, long n) const {
    if (n <= kTableSize && kTableSize % n == 0)
      return table_[static_cast<std::size_t>(j * (kTableSize / n))];
    const CurvePoint c = eval(kTwoPi * static_cast<double>(j) /
                              static_cast<double>(n));
    return {c.position, norm(c.velocity)};
  }

  double arc_length() const { return arc_length_; }
  const SelfDistance& self_distance() const { return self_distance_; }
  double min_self_distance() const { return self_distance_.distance; }
  /// Bounding box of the dense node table, unpadded.
  const Box& hull_box() const { return hull_box_; }
  double diameter() const { return diameter_; }
  double max_curvature() const { return max_curvature_; }
  double closure_gap() const {
    return distance(eval(0.0).position, raw_eval(kTwoPi).position);
  }

  /// Euclidean distance from x to the curve and the minimizing parameter.
  std::pair<double, double> closest(const Vec3& x) const {
    constexpr long kStride = kTableSize / kCoarseSamples;
    std::array<std::pair<double, long>, 3> best;
    best.fill({std::numeric_limits<double>::infinity(), 0});
    auto d2_at = [&](long i) {
      return norm2(x - table_[static_cast<std::size_t>(
                           ((i % kCoarseSamples + kCoarseSamples) %
                            kCoarseSamples) *
                           kStride)]
                           .position);
    };
    for (long i = 0; i < kCoarseSamples; ++i) {
      const double d2 = d2_at(i);
      if (d2 > d2_at(i - 1) || d2 > d2_at(i + 1)) continue;
      if (d2 < best[2].first) {
        best[2] = {d2, i};
        std::sort(best.begin(), best.end());
      }
    }
    constexpr double kGolden = 0.6180339887498949;
    const double h = kTwoPi / kCoarseSamples;
    double dmin = std::numeric_limits<double>::infinity(), tmin = 0;
    for (const auto& [d2, i] : best) {
      if (!std::isfinite(d2)) continue;
      double a = h * static_cast<double>(i - 1), b = a + 2 * h;
      auto f = [&](double t) { return norm2(x - eval(t).position); };
      double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
      double fc = f(c), fd = f(d);
      for (int it = 0; it < 60; ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kGolden * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kGolden * (b - a);
          fd = f(d);
        }
      }
      const double tm = 0.5 * (a + b);
      const double dm = std::min({std::sqrt(f(tm)), std::sqrt(d2)});
      if (dm < dmin) {
        dmin = dm;
        tmin = detail::reduce_angle(tm);
      }
    }
    return {dmin, tmin};
  }
  double distance_to(const Vec3& x) const { return closest(x).first; }

 private:
  CurvePoint raw_eval(double t) const {
    return std::visit([t](const auto& k) { return detail::Evaluator{}(k, t); },
                      kind_);
  }

  void build_table() {
    table_.resize(static_cast<std::size_t>(kTableSize));
    for (long j = 0; j < kTableSize; ++j) {
      const CurvePoint c = eval(kTwoPi * static_cast<double>(j) /
                                static_cast<double>(kTableSize));
      table_[static_cast<std::size_t>(j)] = {c.position, norm(c.velocity)};
    }
  }

  void compute_geometry();
  void validate() const;

  Kind kind_;
  std::string label_;
  std::vector<Node> table_;
  double arc_length_ = 0;
  SelfDistance self_distance_;
  Box hull_box_;
  double diameter_ = 0;
  double max_curvature_ = 0;
  double min_speed_ = 0;
  double arc_length_error_ = 0;
};

/// Reference settings for curve-level integrals.
inline QuadratureConfig curve_quadrature() {
  QuadratureConfig cfg;
  cfg.tolerance = 1e-12;
  return cfg;
}

/// Arc length by the node-doubling periodic trapezoid rule.
inline QuadratureResult<double> arc_length_quadrature(
    const KnotCurve& k, const QuadratureConfig& cfg = curve_quadrature()) {
  auto node_sum = [&k](long n, bool odd_only) {
    double s = 0;
    for (long j = odd_only ? 1 : 0; j < n; j += odd_only ? 2 : 1)
      s += k.node(j, n).speed;
    return s;
  };
  auto err = [](double fine, double coarse) {
    return std::abs(fine - coarse) / std::abs(fine);
  };
  return integrate_periodic<double>(node_sum, err, cfg);
}

/// Minimum-length chord between a curve point r(s) and a perpendicular foot
/// r(t) (where (r(s) - r(t)) . r'(t) = 0) with angular separation above the
/// cut. For a circle the only far feet are antipodes, giving the diameter.
inline SelfDistance compute_min_self_distance(const KnotCurve& k,
                                              long samples = 1024,
                                              double cut = kSelfDistanceCut) {
  const double h = kTwoPi / static_cast<double>(samples);
  std::vector<CurvePoint> pts(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i) pts[i] = k.eval(h * static_cast<double>(i));

  // Root of (r(s) - r(t)) . r'(t) in [ta, tb]; returns the chord length.
  auto foot = [&k](const Vec3& rs, double ta, double tb, double& t_out) {
    auto f = [&](double t) {
      const CurvePoint c = k.eval(t);
      return dot(rs - c.position, c.velocity);
    };
    double fa = f(ta);
    if (fa == 0) {
      t_out = ta;
      return distance(rs, k.eval(ta).position);
    }
    for (int it = 0; it < 60; ++it) {
      const double tm = 0.5 * (ta + tb);
      const double fm = f(tm);
      if ((fm < 0) == (fa < 0)) {
        ta = tm;
        fa = fm;
      } else {
        tb = tm;
      }
    }
    t_out = 0.5 * (ta + tb);
    return distance(rs, k.eval(t_out).position);
  };

  // Far-foot distance from r(s): minimum over all sign changes.
  auto far_foot = [&](double s, double& t_best) {
    const Vec3 rs = k.eval(s).position;
    double best = std::numeric_limits<double>::infinity();
    for (long j = 0; j < samples; ++j) {
      const double ta = h * static_cast<double>(j), tb = ta + h;
      if (detail::angular_separation(s, ta) <= cut ||
          detail::angular_separation(s, tb) <= cut)
        continue;
      const CurvePoint ca = k.eval(ta), cb = k.eval(tb);
      const double fa = dot(rs - ca.position, ca.velocity);
      const double fb = dot(rs - cb.position, cb.velocity);
      if ((fa < 0) == (fb < 0) && fa != 0) continue;
      double t = 0;
      const double d = foot(rs, ta, tb, t);
      if (d < best) {
        best = d;
        t_best = t;
      }
    }
    return best;
  };

  // Coarse pass over sample pairs.
  double best = std::numeric_limits<double>::infinity();
  long best_i = 0;
  for (long i = 0; i < samples; ++i) {
    const Vec3& rs = pts[i].position;
    for (long j = 0; j < samples; ++j) {
      const long jn = (j + 1) % samples;
      if (detail::angular_separation(h * i, h * j) <= cut ||
          detail::angular_separation(h * i, h * (j + 1)) <= cut)
        continue;
      const double fa = dot(rs - pts[j].position, pts[j].velocity);
      const double fb = dot(rs - pts[jn].position, pts[jn].velocity);
      if ((fa < 0) == (fb < 0) && fa != 0) continue;
      const double d = std::min(distance(rs, pts[j].position),
                                distance(rs, pts[jn].position));
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
  }

  // Golden-section refinement of the far-foot distance over s.
  constexpr double kGolden = 0.6180339887498949;
  double a = h * static_cast<double>(best_i - 1), b = a + 2 * h;
  double tc = 0, td = 0;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = far_foot(c, tc), fd = far_foot(d, td);
  for (int it = 0; it < 40; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      td = tc;
      c = b - kGolden * (b - a);
      fc = far_foot(c, tc);
    } else {
      a = c;
      c = d;
      fc = fd;
      tc = td;
      d = a + kGolden * (b - a);
      fd = far_foot(d, td);
    }
  }
  SelfDistance out;
  double t0 = 0;
  const double s0 = h * static_cast<double>(best_i);
  const double f0 = far_foot(s0, t0);
  if (fc < f0) {
    out = {fc, detail::reduce_angle(c), detail::reduce_angle(tc), false};
  } else {
    out = {f0, detail::reduce_angle(s0), detail::reduce_angle(t0), false};
  }
  return out;
}

inline void KnotCurve::compute_geometry() {
  const QuadratureResult<double> len = arc_length_quadrature(*this);
  arc_length_ = len.value;
  arc_length_error_ = len.est_error;

  hull_box_ = {table_[0].position, table_[0].position};
  for (const Node& n : table_) {
    for (int a = 0; a < 3; ++a) {
      hull_box_.lo[a] = std::min(hull_box_.lo[a], n.position[a]);
      hull_box_.hi[a] = std::max(hull_box_.hi[a], n.position[a]);
    }
  }

  constexpr long kStride = kTableSize / kCoarseSamples;
  diameter_ = 0;
  min_speed_ = std::numeric_limits<double>::infinity();
  max_curvature_ = 0;
  for (long i = 0; i < kCoarseSamples; ++i) {
    const Vec3& pi = table_[static_cast<std::size_t>(i * kStride)].position;
    for (long j = i + 1; j < kCoarseSamples; ++j)
      diameter_ = std::max(
          diameter_,
          distance(pi, table_[static_cast<std::size_t>(j * kStride)].position));
  }
  for (long j = 0; j < kTableSize; j += 8) {
    const double t = kTwoPi * static_cast<double>(j) / kTableSize;
    const CurvePoint c = eval(t);
    const double sp = norm(c.velocity);
    min_speed_ = std::min(min_speed_, sp);
    if (sp > 0)
      max_curvature_ = std::max(
          max_curvature_, norm(cross(c.velocity, acceleration(t))) /
                              (sp * sp * sp));
  }

  self_distance_ = compute_min_self_distance(*this);
  self_distance_.intersecting =
      self_distance_.distance < 1e-8 * std::max(arc_length_, 1e-300);
}

inline void KnotCurve::validate() const {
  if (!(min_speed_ > 0))
    throw Error(ErrorCode::kInvalidArgument, "curve is not regular");
  if (!(closure_gap() < 1e-12 * arc_length_))
    throw Error(ErrorCode::kInvalidArgument, "curve is not closed");
  if (self_distance_.intersecting)
    throw Error(ErrorCode::kNotAKnot, "curve intersects itself");
}

/// Torus knot T(p, q) on a torus with radii R > r > 0. (1, 0) yields the
/// circle of radius R in the xy-plane.
inline KnotCurve make_torus_knot(int p, int q, double major_radius,
                                 double minor_radius,
                                 Validation validation = Validation::kOn) {
  const bool circle = p == 1 && q == 0;
  if (p == 0 && q == 0)
    throw Error(ErrorCode::kInvalidArgument, "p and q cannot both be zero");
  if (!circle) {
    const int g = std::gcd(std::abs(p), std::abs(q));
    if (g != 1)
      throw Error(ErrorCode::kNotAKnot,
                  "gcd(p, q) = " + std::to_string(g) + " gives a link");
  }
  if (!(major_radius > 0))
    throw Error(ErrorCode::kInvalidArgument, "R must be positive");
  if (circle) minor_radius = 0;
  if (!circle && validation == Validation::kOn &&
      !(major_radius > minor_radius && minor_radius > 0))
    throw Error(ErrorCode::kInvalidArgument, "torus knot requires R > r > 0");
  std::string label = circle ? "unknot"
                             : "torus(" + std::to_string(p) + "," +
                                   std::to_string(q) + ")";
  return KnotCurve(TorusKnot{p, q, major_radius, minor_radius},
                   std::move(label), validation);
}

inline KnotCurve make_fourier_knot(
    std::vector<std::array<double, 6>> harmonics, std::string label = "fourier",
    Validation validation = Validation::kOn) {
  if (harmonics.empty())
    throw Error(ErrorCode::kInvalidArgument, "no harmonics");
  return KnotCurve(FourierKnot{std::move(harmonics)}, std::move(label),
                   validation);
}

inline KnotCurve make_sampled_knot(std::vector<Vec3> points,
                                   std::string label = "samples",
                                   Validation validation = Validation::kOn) {
  if (points.size() < 4)
    throw Error(ErrorCode::kInvalidArgument,
                "sampled knot needs at least 4 points");
  std::vector<Vec3> m = detail::spline_moments(points);
  return KnotCurve(SampledKnot{std::move(points), std::move(m)},
                   std::move(label), validation);
}

inline CurvePoint eval_curve(const KnotCurve& k, double t) { return k.eval(t); }
inline double arc_length(const KnotCurve& k) { return k.arc_length(); }
inline SelfDistance min_self_distance(const KnotCurve& k) {
  return k.self_distance();
}

/// Padding added to the hull box, relative to the curve diameter.
inline constexpr double kBoxPadding = 1e-6;

/// Axis-aligned box containing every finite critical point: outside the
/// convex hull of a positive charge the field has an outward component.
inline Box search_region(const KnotCurve& k) {
  return k.hull_box().padded(kBoxPadding * k.diameter());
}

/// Tube radius 0.25 * d_min, capped at half the minimum curvature radius so
/// it stays inside the reach of the curve.
inline TubeSpec default_tube(const KnotCurve& k) {
  double rho = 0.25 * k.min_self_distance();
  if (k.max_curvature() > 0) rho = std::min(rho, 0.5 / k.max_curvature());
  return {rho};
}

/// Distances closer than this to the curve are not evaluated.
inline double eval_floor(const KnotCurve& k) {
  return 1e-3 * k.min_self_distance();
}

}  // namespace knotmorse
