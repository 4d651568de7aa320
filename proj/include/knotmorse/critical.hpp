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
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "knotmorse/curve.hpp"
#include "knotmorse/eigen.hpp"
#include "knotmorse/error.hpp"
#include "knotmorse/field.hpp"
#include "knotmorse/parallel.hpp"
#include "knotmorse/vec.hpp"

namespace knotmorse {

struct SearchConfig {
  int n_grid = 24;
  int max_iterations = 60;
  int max_backtracks = 40;
  /// Residual tolerance on |grad Phi| in units of L / diameter^2.
  double tol_res_scale = 1e-8;
  /// Minimum |eigenvalue| / ||H||_F for a Morse (nondegenerate) point.
  double tol_deg = 1e-6;
  /// Deduplication radius in units of the curve diameter.
  double r_dup_scale = 1e-5;
  /// Extra grid-doubling passes allowed when m1 - m2 != 1.
  int refinement_passes = 1;
  unsigned threads = 0;
  QuadratureConfig quadrature;

  void validate() const {
    if (n_grid < 8)
      throw Error(ErrorCode::kInvalidArgument, "n_grid must be >= 8");
    if (!(tol_res_scale > 0 && tol_deg > 0 && r_dup_scale > 0))
      throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
    if (max_iterations < 1)
      throw Error(ErrorCode::kInvalidArgument, "max_iterations must be >= 1");
    quadrature.validate();
  }
};

inline double residual_tolerance(const KnotCurve& k, const SearchConfig& cfg) {
  return cfg.tol_res_scale * k.arc_length() / (k.diameter() * k.diameter());
}
inline double dedup_radius(const KnotCurve& k, const SearchConfig& cfg) {
  return cfg.r_dup_scale * k.diameter();
}

struct CriticalPoint {
  Vec3 x;
  double phi = 0;
  double residual = 0;
  std::array<double, 3> eigvals{};
  std::array<Vec3, 3> eigvecs{};
  /// Number of negative Hessian eigenvalues; -1 when degenerate.
  int index = -1;
  double nondeg_margin = 0;
  bool degenerate = false;
  bool quadrature_converged = true;
};

/// Cell centers of an n^3 grid over the search region, minus those inside
/// the tube.
inline std::vector<Vec3> seed_grid(const KnotCurve& k, const SearchConfig& cfg) {
  cfg.validate();
  const Box box = search_region(k);
  const double rho = default_tube(k).radius;
  const Vec3 ext = box.extent();
  const int n = cfg.n_grid;
  std::vector<Vec3> seeds;
  seeds.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Vec3 p{box.lo.x + (i + 0.5) * ext.x / n,
                     box.lo.y + (j + 0.5) * ext.y / n,
                     box.lo.z + (l + 0.5) * ext.z / n};
        if (k.distance_to(p) > rho) seeds.push_back(p);
      }
  return seeds;
}

/// Morse index from Hessian eigenvalues; throws DegenerateCritical when
/// min |lambda| / ||H||_F <= tol_deg.
inline int classify(const std::array<double, 3>& eigvals, double tol_deg = 1e-6) {
  double fro = 0, min_abs = std::abs(eigvals[0]);
  for (double e : eigvals) {
    fro += e * e;
    min_abs = std::min(min_abs, std::abs(e));
  }
  fro = std::sqrt(fro);
  if (!(fro > 0) || !(min_abs / fro > tol_deg))
    throw Error(ErrorCode::kDegenerateCritical,
                "Hessian is singular to tolerance; perturb the density to "
                "restore the Morse property");
  return static_cast<int>(
      std::count_if(eigvals.begin(), eigvals.end(), [](double e) { return e < 0; }));
}

inline int classify(const CriticalPoint& cp, double tol_deg = 1e-6) {
  return classify(cp.eigvals, tol_deg);
}

/// Fills eigendata, margin and index from a Hessian.
inline void attach_eigendata(CriticalPoint& cp, const Mat3& hess,
                             double tol_deg) {
  const SymmetricEigen eig = symmetric_eigen(hess);
  cp.eigvals = eig.values;
  cp.eigvecs = eig.vectors;
  const double fro = hess.frobenius();
  double min_abs = std::abs(eig.values[0]);
  for (double e : eig.values) min_abs = std::min(min_abs, std::abs(e));
  cp.nondeg_margin = fro > 0 ? min_abs / fro : 0.0;
  try {
    cp.index = classify(cp.eigvals, tol_deg);
    cp.degenerate = false;
  } catch (const Error&) {
    cp.index = -1;
    cp.degenerate = true;
  }
}

enum class NewtonStatus {
  kConverged,
  kMaxIterations,
  kLeftRegion,
  kEnteredTube,
  kSingularStep,
  kStalled,
};

inline const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::kConverged: return "Converged";
    case NewtonStatus::kMaxIterations: return "MaxIterations";
    case NewtonStatus::kLeftRegion: return "LeftRegion";
    case NewtonStatus::kEnteredTube: return "EnteredTube";
    case NewtonStatus::kSingularStep: return "SingularStep";
    case NewtonStatus::kStalled: return "Stalled";
  }
  return "Unknown";
}

struct NewtonResult {
  NewtonStatus status = NewtonStatus::kMaxIterations;
  CriticalPoint point;
  int iterations = 0;

  bool converged() const { return status == NewtonStatus::kConverged; }
};

/// Damped Newton iteration on grad Phi = 0 with the analytic Hessian. Steps
/// are halved until |grad Phi| decreases; trial points inside the tube or far
/// outside the search region count as failed trials.
inline NewtonResult newton_refine(const KnotCurve& k, const Vec3& x0,
                                  const SearchConfig& cfg) {
  const Box region = search_region(k);
  const Box wide = region.padded(0.5 * k.diameter());
  const double rho = default_tube(k).radius;
  const double tol = residual_tolerance(k, cfg);
  NewtonResult out;
  if (k.distance_to(x0) <= rho) {
    out.status = NewtonStatus::kEnteredTube;
    return out;
  }
  FieldSample s = field_sample(k, x0, cfg.quadrature);
  double r = norm(s.grad);
  for (int it = 0; it <= cfg.max_iterations; ++it) {
    out.iterations = it;
    if (r < tol) {
      out.status = NewtonStatus::kConverged;
      break;
    }
    if (it == cfg.max_iterations) {
      out.status = NewtonStatus::kMaxIterations;
      return out;
    }
    Vec3 step;
    if (!solve(s.hess, -s.grad, step)) {
      out.status = NewtonStatus::kSingularStep;
      return out;
    }
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt, alpha *= 0.5) {
      const Vec3 xn = s.x + alpha * step;
      if (!wide.contains(xn) || k.distance_to(xn) <= rho) continue;
      FieldSample sn = field_sample(k, xn, cfg.quadrature);
      const double rn = norm(sn.grad);
      if (rn < r) {
        s = sn;
        r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.status = NewtonStatus::kStalled;
      return out;
    }
  }
  if (!region.contains(s.x)) {
    out.status = NewtonStatus::kLeftRegion;
    return out;
  }
  if (k.distance_to(s.x) <= rho) {
    out.status = NewtonStatus::kEnteredTube;
    return out;
  }
  CriticalPoint& cp = out.point;
  cp.x = s.x;
  cp.phi = s.phi;
  cp.residual = r;
  cp.quadrature_converged = s.converged;
  attach_eigendata(cp, s.hess, cfg.tol_deg);
  return out;
}

namespace detail {
inline bool phi_then_lex(const CriticalPoint& a, const CriticalPoint& b) {
  return std::tie(a.phi, a.x.x, a.x.y, a.x.z) <
         std::tie(b.phi, b.x.x, b.x.y, b.x.z);
}
}  // namespace detail

/// Merges points closer than `radius`, keeping the lowest residual. Input is
/// first sorted by (phi, x) so the result is independent of input order; the
/// output is sorted the same way.
inline std::vector<CriticalPoint> deduplicate(std::vector<CriticalPoint> pts,
                                              double radius) {
  std::sort(pts.begin(), pts.end(), detail::phi_then_lex);
  std::vector<CriticalPoint> kept;
  for (const CriticalPoint& p : pts) {
    auto it = std::find_if(kept.begin(), kept.end(), [&](const CriticalPoint& q) {
      return distance(p.x, q.x) < radius;
    });
    if (it == kept.end()) {
      kept.push_back(p);
    } else if (p.residual < it->residual) {
      *it = p;
    }
  }
  std::sort(kept.begin(), kept.end(), detail::phi_then_lex);
  return kept;
}

/// Newton from every grid seed, then deduplication. Sorted by phi ascending.
inline std::vector<CriticalPoint> find_critical_points(const KnotCurve& k,
                                                       const SearchConfig& cfg) {
  const std::vector<Vec3> seeds = seed_grid(k, cfg);
  std::vector<NewtonResult> results(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) { results[i] = newton_refine(k, seeds[i], cfg); },
      cfg.threads);
  std::vector<CriticalPoint> found;
  for (const NewtonResult& r : results)
    if (r.converged()) found.push_back(r.point);
  return deduplicate(std::move(found), dedup_radius(k, cfg));
}

struct IndexCounts {
  int index1 = 0;
  int index2 = 0;
  int other = 0;
};

inline IndexCounts count_indices(const std::vector<CriticalPoint>& pts) {
  IndexCounts c;
  for (const CriticalPoint& p : pts) {
    if (p.index == 1)
      ++c.index1;
    else if (p.index == 2)
      ++c.index2;
    else
      ++c.other;
  }
  return c;
}

struct SearchOutcome {
  std::vector<CriticalPoint> points;
  int passes = 1;
  int final_grid = 0;
  bool balanced = false;  // m1 - m2 == 1 with no degenerate points
};

/// find_critical_points, doubling the grid while the index balance m1 - m2 = 1
/// fails and refinement passes remain; points from all passes are merged.
inline SearchOutcome search_critical_points(const KnotCurve& k,
                                            const SearchConfig& cfg) {
  SearchOutcome out;
  SearchConfig pass = cfg;
  std::vector<CriticalPoint> all;
  for (int p = 0; p <= cfg.refinement_passes; ++p) {
    std::vector<CriticalPoint> found = find_critical_points(k, pass);
    all.insert(all.end(), found.begin(), found.end());
    all = deduplicate(std::move(all), dedup_radius(k, cfg));
    out.passes = p + 1;
    out.final_grid = pass.n_grid;
    const IndexCounts c = count_indices(all);
    out.balanced = c.other == 0 && c.index1 - c.index2 == 1;
    if (out.balanced) break;
    pass.n_grid *= 2;
  }
  out.points = std::move(all);
  return out;
}

}  // namespace knotmorse
