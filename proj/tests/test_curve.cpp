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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "knotmorse/curve.hpp"

using namespace knotmorse;

namespace {

constexpr double kPi = std::numbers::pi;

// Fixed midpoint sum of |r'|, independent of the cached node table.
double midpoint_length(const KnotCurve& k, long n) {
  double s = 0;
  for (long i = 0; i < n; ++i) s += norm(k.eval((i + 0.5) * kTwoPi / n).velocity);
  return s * kTwoPi / n;
}

// Smallest interior local minimum of |r(s) - r(t)| on an n x n grid, away
// from the diagonal band. These are the doubly perpendicular chords.
double brute_min_chord(const KnotCurve& k, int n) {
  std::vector<Vec3> p(n);
  for (int i = 0; i < n; ++i) p[i] = k.eval(kTwoPi * i / n).position;
  auto d = [&](int i, int j) { return distance(p[(i + n) % n], p[(j + n) % n]); };
  const int band = static_cast<int>(0.6 / (kTwoPi / n)) + 2;
  double best = 1e300;
  for (int i = 0; i < n; ++i)
    for (int j = i + band; j < i + n - band; ++j) {
      const double v = d(i, j);
      bool local = true;
      for (int a = -1; a <= 1 && local; ++a)
        for (int b = -1; b <= 1 && local; ++b)
          if ((a || b) && d(i + a, j + b) < v) local = false;
      if (local) best = std::min(best, v);
    }
  return best;
}

}  // namespace

TEST(TorusKnot, EvaluatesParametrization) {
  const KnotCurve k = make_torus_knot(2, 3, 2.0, 1.0);
  const CurvePoint c0 = k.eval(0);
  EXPECT_NEAR(distance(c0.position, Vec3{3, 0, 0}), 0, 1e-15);
  EXPECT_NEAR(distance(c0.velocity, Vec3{0, 6, 3}), 0, 1e-14);
  const CurvePoint c = k.eval(kPi / 6);
  EXPECT_NEAR(c.position.x, 2 * std::cos(kPi / 3), 1e-15);
  EXPECT_NEAR(c.position.z, 1.0, 1e-15);
  // t is taken mod 2 pi.
  EXPECT_NEAR(distance(k.eval(kTwoPi + 0.3).position, k.eval(0.3).position), 0, 1e-13);
  EXPECT_NEAR(distance(k.eval(-0.3).position, k.eval(kTwoPi - 0.3).position), 0, 1e-13);
}

TEST(TorusKnot, VelocityMatchesFiniteDifference) {
  for (const KnotCurve& k : {make_torus_knot(2, 3, 2, 1), make_torus_knot(3, 4, 2, 1),
                             make_torus_knot(1, 0, 1, 0)}) {
    for (double t : {0.1, 1.7, 4.2}) {
      const double h = 1e-6;
      const Vec3 fd = (k.eval(t + h).position - k.eval(t - h).position) / (2 * h);
      EXPECT_LT(distance(fd, k.eval(t).velocity), 1e-7 * norm(fd)) << k.label();
      const Vec3 fa = (k.eval(t + h).velocity - k.eval(t - h).velocity) / (2 * h);
      EXPECT_LT(distance(fa, k.acceleration(t)), 1e-6 * norm(fa)) << k.label();
    }
  }
}

TEST(TorusKnot, CircleSpecialCase) {
  const KnotCurve c = make_torus_knot(1, 0, 1.0, 0.0);
  EXPECT_EQ(c.label(), "unknot");
  EXPECT_NEAR(c.arc_length(), 2 * kPi, 1e-13);
  EXPECT_NEAR(c.min_self_distance(), 2.0, 1e-9);
  EXPECT_NEAR(c.diameter(), 2.0, 1e-12);
  EXPECT_NEAR(c.max_curvature(), 1.0, 1e-12);
  EXPECT_NEAR(default_tube(c).radius, 0.5, 1e-9);
  EXPECT_NEAR(eval_floor(c), 2e-3, 1e-12);
  const Box b = c.hull_box();
  EXPECT_NEAR(b.lo.x, -1, 1e-12);
  EXPECT_NEAR(b.hi.y, 1, 1e-12);
  EXPECT_NEAR(b.hi.z - b.lo.z, 0, 1e-15);
}

TEST(TorusKnot, ScaledCircle) {
  const KnotCurve c = make_torus_knot(1, 0, 3.5, 0.0);
  EXPECT_NEAR(c.arc_length(), 7 * kPi, 1e-12);
  EXPECT_NEAR(c.min_self_distance(), 7.0, 1e-8);
}

TEST(TorusKnot, RejectsLinksAndBadRadii) {
  try {
    make_torus_knot(2, 4, 2, 1);
    FAIL() << "gcd 2 accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAKnot);
  }
  EXPECT_THROW(make_torus_knot(0, 0, 2, 1), Error);
  EXPECT_THROW(make_torus_knot(2, 3, 1, 1), Error);
  EXPECT_THROW(make_torus_knot(2, 3, 1, 2), Error);
  EXPECT_THROW(make_torus_knot(2, 3, -2, 1), Error);
  EXPECT_NO_THROW(make_torus_knot(2, 3, 1, 2, Validation::kOff));
}

TEST(TorusKnot, Labels) {
  EXPECT_EQ(make_torus_knot(2, 3, 2, 1).label(), "torus(2,3)");
  EXPECT_EQ(make_torus_knot(3, -4, 2, 1).label(), "torus(3,-4)");
}

// Frozen from a 1e5-node midpoint sum.
TEST(ArcLength, TorusKnotsAgainstMidpointOracle) {
  const KnotCurve t23 = make_torus_knot(2, 3, 2, 1);
  const KnotCurve t34 = make_torus_knot(3, 4, 2, 1);
  EXPECT_NEAR(t23.arc_length(), 31.8986006664123, 1e-11);
  EXPECT_NEAR(t34.arc_length(), 45.9618325232794, 1e-11);
  EXPECT_NEAR(t23.arc_length(), midpoint_length(t23, 4096), 1e-11);
  const QuadratureResult<double> q = arc_length_quadrature(t23);
  EXPECT_TRUE(q.converged);
  EXPECT_LT(q.est_error, 1e-12);
}

TEST(SelfDistance, MatchesDoublyPerpendicularChord) {
  for (const KnotCurve& k : {make_torus_knot(2, 3, 2, 1), make_torus_knot(3, 4, 2, 1)}) {
    const double brute = brute_min_chord(k, 720);
    EXPECT_NEAR(k.min_self_distance(), brute, 2e-3 * brute) << k.label();
    EXPECT_LE(k.min_self_distance(), brute * (1 + 1e-9)) << k.label();
    EXPECT_FALSE(k.self_distance().intersecting);
  }
  EXPECT_NEAR(make_torus_knot(2, 3, 2, 1).min_self_distance(), 1.66327230831077, 1e-9);
  EXPECT_NEAR(make_torus_knot(3, 4, 2, 1).min_self_distance(), 1.25801165445269, 1e-9);
}

TEST(SelfDistance, WitnessParametersRealizeDistance) {
  const KnotCurve k = make_torus_knot(2, 3, 2, 1);
  const SelfDistance& d = k.self_distance();
  EXPECT_NEAR(distance(k.eval(d.s).position, k.eval(d.t).position), d.distance, 1e-9);
  EXPECT_GT(detail::angular_separation(d.s, d.t), kSelfDistanceCut);
}

TEST(SelfDistance, DetectsSelfIntersection) {
  // A figure-eight planar curve crosses itself at the origin.
  std::vector<std::array<double, 6>> h = {{0, 1, 0, 0, 0, 0}, {0, 0, 0, 0.5, 0, 0}};
  try {
    make_fourier_knot(h, "lemniscate");
    FAIL() << "self-intersecting curve accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotAKnot);
  }
  EXPECT_NO_THROW(make_fourier_knot(h, "lemniscate", Validation::kOff));
}

TEST(Closest, FindsFootOnCircle) {
  const KnotCurve c = make_torus_knot(1, 0, 1, 0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    const double rho = std::hypot(x.x, x.y);
    const double exact = std::hypot(rho - 1, x.z);
    EXPECT_NEAR(c.distance_to(x), exact, 1e-10) << x.x << " " << x.y << " " << x.z;
  }
}

TEST(Closest, AgreesWithDenseSampling) {
  const KnotCurve k = make_torus_knot(3, 4, 2, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.5, 3.5);
  const int n = 20000;
  std::vector<Vec3> p(n);
  for (int i = 0; i < n; ++i) p[i] = k.eval(kTwoPi * i / n).position;
  for (int i = 0; i < 60; ++i) {
    const Vec3 x{u(rng), u(rng), 0.4 * u(rng)};
    double best = 1e300;
    for (const Vec3& q : p) best = std::min(best, distance(x, q));
    const auto [dist, t] = k.closest(x);
    EXPECT_LE(dist, best + 1e-12);
    // The sampled minimum overshoots by about spacing^2 / (8 dist).
    const double spacing = k.arc_length() / n;
    EXPECT_NEAR(dist, best, spacing * spacing / dist);
    EXPECT_NEAR(distance(k.eval(t).position, x), dist, 1e-12);
  }
}

TEST(FourierKnot, TrefoilParametrization) {
  const KnotCurve k =
      make_fourier_knot({{0, 1, 1, 0, 0, 0}, {0, 2, -2, 0, 0, 0}, {0, 0, 0, 0, 0, -1}});
  const double t = 0.8;
  const CurvePoint c = k.eval(t);
  EXPECT_NEAR(c.position.x, std::sin(t) + 2 * std::sin(2 * t), 1e-15);
  EXPECT_NEAR(c.position.y, std::cos(t) - 2 * std::cos(2 * t), 1e-15);
  EXPECT_NEAR(c.position.z, -std::sin(3 * t), 1e-15);
  EXPECT_NEAR(c.velocity.z, -3 * std::cos(3 * t), 1e-14);
  EXPECT_NEAR(k.arc_length(), midpoint_length(k, 4096), 1e-11);
  EXPECT_LT(k.closure_gap(), 1e-14);
}

TEST(FourierKnot, RejectsEmptyAndDegenerate) {
  EXPECT_THROW(make_fourier_knot({}), Error);
  // Constant zero curve has no speed.
  EXPECT_THROW(make_fourier_knot({{0, 0, 0, 0, 0, 0}}), Error);
}

TEST(SampledKnot, InterpolatesAndConvergesToSource) {
  const KnotCurve exact = make_torus_knot(2, 3, 2, 1);
  auto sampled = [&](int n) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) pts.push_back(exact.eval(kTwoPi * i / n).position);
    return make_sampled_knot(pts, "trefoil");
  };
  const KnotCurve s96 = sampled(96), s192 = sampled(192);
  for (int i = 0; i < 96; ++i)
    EXPECT_NEAR(distance(s96.eval(kTwoPi * i / 96).position,
                         exact.eval(kTwoPi * i / 96).position),
                0, 1e-12);
  const double e96 = std::abs(s96.arc_length() - exact.arc_length());
  const double e192 = std::abs(s192.arc_length() - exact.arc_length());
  EXPECT_LT(e96, 1e-3 * exact.arc_length());
  // Cubic splines: error falls by roughly 2^4 per halving.
  EXPECT_LT(e192, e96 / 8);
  EXPECT_LT(s96.closure_gap(), 1e-12 * s96.arc_length());
}

TEST(SampledKnot, VelocityIsContinuousAtKnots) {
  const KnotCurve exact = make_torus_knot(2, 3, 2, 1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 48; ++i) pts.push_back(exact.eval(kTwoPi * i / 48).position);
  const KnotCurve s = make_sampled_knot(pts);
  const double h = kTwoPi / 48;
  for (int i = 0; i < 48; ++i) {
    const double t = h * i;
    EXPECT_LT(distance(s.eval(t - 1e-9).velocity, s.eval(t + 1e-9).velocity), 1e-6);
  }
}

TEST(SampledKnot, NeedsFourPoints) {
  EXPECT_THROW(make_sampled_knot({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), Error);
}

TEST(SearchRegion, ContainsCurveWithPadding) {
  const KnotCurve k = make_torus_knot(2, 3, 2, 1);
  const Box b = search_region(k);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(b.contains(k.eval(kTwoPi * i / 1000).position));
  EXPECT_NEAR(b.hi.z, 1.0 + kBoxPadding * k.diameter(), 1e-9);
  EXPECT_NEAR(k.diameter(), 5.73286968198851, 1e-3);
}

TEST(Tube, RadiusIsQuarterSelfDistanceForTorusKnots) {
  const KnotCurve k = make_torus_knot(2, 3, 2, 1);
  EXPECT_NEAR(default_tube(k).radius, 0.25 * k.min_self_distance(), 1e-15);
  EXPECT_LT(default_tube(k).radius * k.max_curvature(), 0.5);
}
