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
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "knotmorse/critical.hpp"
#include "knotmorse/curve.hpp"
#include "knotmorse/error.hpp"
#include "knotmorse/field.hpp"
#include "knotmorse/parallel.hpp"
#include "knotmorse/vec.hpp"

namespace knotmorse {

enum class TimeDirection { kForward, kBackward };

enum class Termination { kKnotTube, kFarField, kNearCritical, kMaxSteps };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kKnotTube: return "KnotTube";
    case Termination::kFarField: return "FarField";
    case Termination::kNearCritical: return "NearCritical";
    case Termination::kMaxSteps: return "MaxSteps";
  }
  return "Unknown";
}

enum class ArcKind { kTrajectory, kTunnelGamma, kThetaLoop };

inline const char* to_string(ArcKind k) {
  switch (k) {
    case ArcKind::kTrajectory: return "Trajectory";
    case ArcKind::kTunnelGamma: return "TunnelGamma";
    case ArcKind::kThetaLoop: return "ThetaLoop";
  }
  return "Unknown";
}

struct FlowConfig {
  /// Launch offset along the separatrix eigenvector, in units of diameter.
  double launch_offset_scale = 1e-4;
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Far-field radius around the hull center, in units of diameter.
  double far_field_scale = 50.0;
  int max_steps = 20000;
  /// Tube radius override; <= 0 selects default_tube().
  double tube_radius = 0;
  /// NearCritical fires within r_dup of a known point when |grad| is below
  /// this multiple of the residual tolerance.
  double near_critical_factor = 10.0;
  double tol_res_scale = 1e-8;
  double r_dup_scale = 1e-5;
  unsigned threads = 0;
  QuadratureConfig quadrature;

  void validate() const {
    if (!(launch_offset_scale > 0 && launch_offset_scale < 1e-1))
      throw Error(ErrorCode::kInvalidArgument,
                  "launch offset must be small and positive");
    if (!(far_field_scale > 10))
      throw Error(ErrorCode::kInvalidArgument,
                  "far-field radius must exceed 10 diameters");
    if (!(rtol > 0 && atol > 0))
      throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
    if (max_steps < 1)
      throw Error(ErrorCode::kInvalidArgument, "max_steps must be >= 1");
    quadrature.validate();
  }
};

inline double tube_radius(const KnotCurve& k, const FlowConfig& cfg) {
  return cfg.tube_radius > 0 ? cfg.tube_radius : default_tube(k).radius;
}
inline double far_field_radius(const KnotCurve& k, const FlowConfig& cfg) {
  return cfg.far_field_scale * k.diameter();
}
/// Phi below this value is consistent with the point at infinity; the far
/// field is a monopole, Phi ~ L / |x|.
inline double infinity_threshold(const KnotCurve& k, const FlowConfig& cfg) {
  return 1.2 * k.arc_length() / far_field_radius(k, cfg);
}

struct FlowPoint {
  Vec3 x;
  double phi = 0;
};

struct FlowArc {
  ArcKind kind = ArcKind::kTrajectory;
  int seed = -1;   // index into the critical list, -1 for free trajectories
  int branch = 0;  // +1 / -1 along the launching eigenvector
  TimeDirection direction = TimeDirection::kForward;
  std::vector<FlowPoint> polyline;
  Termination termination = Termination::kMaxSteps;
  /// Largest per-step relative move of phi against the flow direction.
  double max_monotonicity_violation = 0;
  int rejected_steps = 0;
  bool quadrature_converged = true;

  const FlowPoint& back() const { return polyline.back(); }
  bool matches_expectation() const {
    switch (kind) {
      case ArcKind::kTunnelGamma: return termination == Termination::kKnotTube;
      case ArcKind::kThetaLoop: return termination == Termination::kFarField;
      default: return true;
    }
  }
};

namespace detail {

struct FlowState {
  Vec3 dir;  // unit flow direction
  double phi = 0;
  double grad_norm = 0;
  bool converged = true;
};

inline FlowState flow_direction(const KnotCurve& k, const Vec3& x, double sign,
                                const QuadratureConfig& q) {
  const FieldSample s = evaluate(k, x, q, kPotential | kGradient);
  FlowState st;
  st.phi = s.phi;
  st.grad_norm = norm(s.grad);
  st.dir = st.grad_norm > 0 ? (sign / st.grad_norm) * s.grad : Vec3{};
  st.converged = s.converged;
  return st;
}

// Dormand-Prince 5(4) tableau.
inline constexpr double kC[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
inline constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double kE[7] = {71.0 / 57600,  0,           -71.0 / 16695,
                                 71.0 / 1920,   -17253.0 / 339200,
                                 22.0 / 525,    -1.0 / 40};

}  // namespace detail

/// Integrates dx/ds = +-grad Phi / |grad Phi| (arc-length parametrized
/// gradient flow; forward ascends Phi) with an adaptive Dormand-Prince 5(4)
/// pair and PI step control. Stops at the first of: inside the tube
/// (KnotTube), beyond the far-field radius (FarField), next to a known
/// critical point with vanishing gradient (NearCritical), step budget.
inline FlowArc integrate_flow(const KnotCurve& k, const Vec3& x0,
                              TimeDirection direction, const FlowConfig& cfg,
                              std::span<const CriticalPoint> known = {},
                              double initial_step = 0) {
  cfg.validate();
  const double rho = tube_radius(k, cfg);
  const double r_far = far_field_radius(k, cfg);
  const Vec3 center = k.hull_box().center();
  const double diam = k.diameter();
  const double near_radius = cfg.r_dup_scale * diam;
  const double near_grad = cfg.near_critical_factor * cfg.tol_res_scale *
                           k.arc_length() / (diam * diam);
  const double sign = direction == TimeDirection::kForward ? 1.0 : -1.0;
  if (!(norm(x0 - center) < r_far))
    throw Error(ErrorCode::kInvalidArgument, "start point beyond far field");

  FlowArc arc;
  arc.direction = direction;
  check_evaluable(k, x0);
  detail::FlowState st = detail::flow_direction(k, x0, sign, cfg.quadrature);
  arc.polyline.push_back({x0, st.phi});
  arc.quadrature_converged = st.converged;

  auto terminated = [&](const Vec3& x, const detail::FlowState& s, double dist) {
    if (dist < rho) {
      arc.termination = Termination::kKnotTube;
      return true;
    }
    if (norm(x - center) > r_far) {
      arc.termination = Termination::kFarField;
      return true;
    }
    if (s.grad_norm < near_grad) {
      for (const CriticalPoint& cp : known) {
        if (distance(cp.x, x) < near_radius) {
          arc.termination = Termination::kNearCritical;
          return true;
        }
      }
    }
    return false;
  };
  double dist = k.distance_to(x0);
  if (terminated(x0, st, dist)) return arc;
  if (st.grad_norm == 0) {
    arc.termination = Termination::kNearCritical;
    return arc;
  }

  Vec3 x = x0;
  double h = initial_step > 0 ? initial_step : 1e-3 * diam;
  double err_prev = 1e-4;
  int steps = 0;
  std::array<Vec3, 7> kv;
  while (true) {
    if (steps >= cfg.max_steps) {
      arc.termination = Termination::kMaxSteps;
      return arc;
    }
    const double h_max =
        std::min(0.5 * dist, 0.25 * std::max(norm(x - center), diam));
    h = std::min(h, h_max);
    kv[0] = st.dir;
    bool stage_failed = false;
    detail::FlowState last;
    Vec3 xn;
    try {
      for (int s = 1; s < 7; ++s) {
        Vec3 xs = x;
        for (int j = 0; j < s; ++j) xs += (h * detail::kA[s][j]) * kv[j];
        const detail::FlowState fs =
            detail::flow_direction(k, xs, sign, cfg.quadrature);
        kv[s] = fs.dir;
        if (s == 6) {
          xn = xs;
          last = fs;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooCloseToKnot) throw;
      stage_failed = true;
    }
    double err = 0;
    if (!stage_failed) {
      Vec3 e;
      for (int j = 0; j < 7; ++j) e += (h * detail::kE[j]) * kv[j];
      for (int a = 0; a < 3; ++a) {
        const double sc =
            cfg.atol + cfg.rtol * std::max(std::abs(x[a]), std::abs(xn[a]));
        err = std::max(err, std::abs(e[a]) / sc);
      }
    }
    if (stage_failed || !(err <= 1.0)) {
      ++arc.rejected_steps;
      h *= stage_failed ? 0.25
                        : std::max(0.2, 0.9 * std::pow(std::max(err, 1e-300), -0.2));
      if (h < 1e-14 * diam) {
        arc.termination = Termination::kMaxSteps;
        return arc;
      }
      continue;
    }
    ++steps;
    const double prev_phi = st.phi;
    x = xn;
    st = last;
    arc.quadrature_converged = arc.quadrature_converged && st.converged;
    arc.polyline.push_back({x, st.phi});
    const double violation = std::max(0.0, -sign * (st.phi - prev_phi)) /
                             std::abs(prev_phi);
    arc.max_monotonicity_violation =
        std::max(arc.max_monotonicity_violation, violation);
    dist = k.distance_to(x);
    if (terminated(x, st, dist)) return arc;
    if (st.grad_norm == 0) {
      arc.termination = Termination::kNearCritical;
      return arc;
    }
    const double e = std::max(err, 1e-10);
    const double fac =
        std::clamp(0.9 * std::pow(e, -0.14) * std::pow(err_prev, 0.08), 0.2, 5.0);
    err_prev = e;
    h *= fac;
  }
}

namespace detail {

// Eigenvector sign fixed so the largest-magnitude component is positive.
inline Vec3 canonical_sign(Vec3 v) {
  int im = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(v[a]) > std::abs(v[im])) im = a;
  return v[im] < 0 ? -v : v;
}

inline FlowArc launch(const KnotCurve& k, const CriticalPoint& p,
                      const Vec3& dir, int branch, ArcKind kind,
                      TimeDirection td, const FlowConfig& cfg,
                      std::span<const CriticalPoint> known) {
  const double delta = cfg.launch_offset_scale * k.diameter();
  const Vec3 x0 = p.x + (branch * delta) * dir;
  FlowArc arc = integrate_flow(k, x0, td, cfg, known, 0.25 * delta);
  arc.kind = kind;
  arc.branch = branch;
  arc.polyline.insert(arc.polyline.begin(), FlowPoint{p.x, p.phi});
  return arc;
}

}  // namespace detail

/// Both branches of the 1-dimensional unstable manifold of an index-2 point,
/// launched along the eigenvector of the single positive eigenvalue and
/// integrated forward. Both are expected to end in the knot tube.
inline std::array<FlowArc, 2> trace_unstable(
    const KnotCurve& k, const CriticalPoint& p, const FlowConfig& cfg,
    std::span<const CriticalPoint> known = {}) {
  if (p.index != 2)
    throw Error(ErrorCode::kWrongIndex,
                "unstable separatrix needs index 2, got " +
                    std::to_string(p.index));
  const Vec3 v = detail::canonical_sign(p.eigvecs[2]);
  return {detail::launch(k, p, v, +1, ArcKind::kTunnelGamma,
                         TimeDirection::kForward, cfg, known),
          detail::launch(k, p, v, -1, ArcKind::kTunnelGamma,
                         TimeDirection::kForward, cfg, known)};
}

/// Both branches of the 1-dimensional stable manifold of an index-1 point,
/// integrated backward from the eigenvector of the single negative
/// eigenvalue. Both are expected to reach the far field.
inline std::array<FlowArc, 2> trace_stable(
    const KnotCurve& k, const CriticalPoint& p, const FlowConfig& cfg,
    std::span<const CriticalPoint> known = {}) {
  if (p.index != 1)
    throw Error(ErrorCode::kWrongIndex,
                "stable separatrix needs index 1, got " +
                    std::to_string(p.index));
  const Vec3 v = detail::canonical_sign(p.eigvecs[0]);
  return {detail::launch(k, p, v, +1, ArcKind::kThetaLoop,
                         TimeDirection::kBackward, cfg, known),
          detail::launch(k, p, v, -1, ArcKind::kThetaLoop,
                         TimeDirection::kBackward, cfg, known)};
}

/// Gamma arcs (unstable manifolds of index-2 points) and Theta loops (stable
/// manifolds of index-1 points, closed up at infinity), ordered by
/// (critical point, branch +1 then -1).
struct Tunneling {
  std::vector<FlowArc> gammas;  // 2 branches per index-2 point
  std::vector<FlowArc> thetas;  // 2 branches per index-1 point
  int m1 = 0;
  int m2 = 0;
  std::vector<std::string> anomalies;

  int gamma_count() const { return m2; }
  int theta_count() const { return m1; }
  bool consistent() const { return anomalies.empty() && m1 - m2 == 1; }
};

inline Tunneling build_tunneling(const KnotCurve& k,
                                 const std::vector<CriticalPoint>& crit,
                                 const FlowConfig& cfg) {
  if (crit.empty())
    throw Error(ErrorCode::kInconsistent,
                "empty critical list: an index-1 point always exists");
  struct Task {
    int seed;
    int branch;
    bool gamma;
  };
  std::vector<Task> tasks;
  Tunneling out;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const int idx = crit[i].index;
    if (idx == 2) {
      ++out.m2;
      tasks.push_back({static_cast<int>(i), +1, true});
      tasks.push_back({static_cast<int>(i), -1, true});
    } else if (idx == 1) {
      ++out.m1;
      tasks.push_back({static_cast<int>(i), +1, false});
      tasks.push_back({static_cast<int>(i), -1, false});
    } else {
      out.anomalies.push_back("critical point " + std::to_string(i) +
                              " has no separatrix (index " +
                              std::to_string(idx) + ")");
    }
  }
  if (out.m1 == 0)
    throw Error(ErrorCode::kInconsistent,
                "no index-1 critical point: an index-1 point always exists");
  std::vector<FlowArc> arcs(tasks.size());
  const std::span<const CriticalPoint> known(crit);
  parallel_for(
      tasks.size(),
      [&](std::size_t t) {
        const Task& task = tasks[t];
        const CriticalPoint& p = crit[static_cast<std::size_t>(task.seed)];
        const auto pair = task.gamma ? trace_unstable(k, p, cfg, known)
                                     : trace_stable(k, p, cfg, known);
        arcs[t] = pair[task.branch > 0 ? 0 : 1];
        arcs[t].seed = task.seed;
      },
      cfg.threads);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    FlowArc& a = arcs[t];
    if (!a.matches_expectation())
      out.anomalies.push_back(std::string(to_string(a.kind)) + " from point " +
                              std::to_string(a.seed) + " branch " +
                              (a.branch > 0 ? "+" : "-") + " ended " +
                              to_string(a.termination));
    (tasks[t].gamma ? out.gammas : out.thetas).push_back(std::move(a));
  }
  return out;
}

struct CensusStats {
  int samples = 0;
  int far_field = 0;
  int knot_tube = 0;
  int near_critical = 0;
  int max_steps = 0;
  double max_monotonicity_violation = 0;
  std::vector<Vec3> flagged;  // starts that did not reach the far field

  double far_field_fraction() const {
    return samples > 0 ? static_cast<double>(far_field) / samples : 0.0;
  }
};

namespace detail {
inline double distance_to_polyline(const Vec3& p,
                                   const std::vector<FlowPoint>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec3 a = line[i].x, ab = line[i + 1].x - a;
    const double l2 = norm2(ab);
    const double u = l2 > 0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(p, a + u * ab));
  }
  if (line.size() == 1) best = distance(p, line[0].x);
  return best;
}
}  // namespace detail

/// Backward flows from `n` uniform points in the search region (outside the
/// knot tube and outside tubes of the same radius around Gamma arcs).
inline CensusStats descending_flow_census(
    const KnotCurve& k, int n, const FlowConfig& cfg, std::uint64_t seed,
    const std::vector<CriticalPoint>& crit = {},
    const std::vector<FlowArc>& gammas = {}) {
  CensusStats stats;
  if (n <= 0) return stats;
  const Box box = search_region(k);
  const double rho = tube_radius(k, cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Vec3> starts;
  long attempts = 0;
  while (static_cast<int>(starts.size()) < n) {
    if (++attempts > 1000L * n)
      throw Error(ErrorCode::kInvalidArgument,
                  "search region has no room outside the tubes");
    Vec3 p;
    for (int a = 0; a < 3; ++a)
      p[a] = box.lo[a] + u01(rng) * (box.hi[a] - box.lo[a]);
    if (k.distance_to(p) <= rho) continue;
    bool near_gamma = false;
    for (const FlowArc& g : gammas)
      if (detail::distance_to_polyline(p, g.polyline) <= rho) {
        near_gamma = true;
        break;
      }
    if (!near_gamma) starts.push_back(p);
  }
  std::vector<FlowArc> arcs(starts.size());
  const std::span<const CriticalPoint> known(crit);
  parallel_for(
      starts.size(),
      [&](std::size_t i) {
        arcs[i] = integrate_flow(k, starts[i], TimeDirection::kBackward, cfg,
                                 known);
      },
      cfg.threads);
  stats.samples = n;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const FlowArc& a = arcs[i];
    stats.max_monotonicity_violation =
        std::max(stats.max_monotonicity_violation, a.max_monotonicity_violation);
    switch (a.termination) {
      case Termination::kFarField: ++stats.far_field; break;
      case Termination::kKnotTube: ++stats.knot_tube; break;
      case Termination::kNearCritical: ++stats.near_critical; break;
      case Termination::kMaxSteps: ++stats.max_steps; break;
    }
    if (a.termination != Termination::kFarField)
      stats.flagged.push_back(starts[i]);
  }
  return stats;
}

}  // namespace knotmorse
