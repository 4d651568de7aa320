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

#include <array>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knotmorse/critical.hpp"
#include "knotmorse/error.hpp"

namespace knotmorse {

/// Betti numbers of a knot complement in S^3: H_0 = H_1 = Z, higher vanish.
inline constexpr std::array<int, 4> kKnotComplementBetti = {1, 1, 0, 0};

struct MorseReport {
  std::string knot;
  /// m[i] = number of critical points of index i. m[0] = 1 is the point at
  /// infinity (Phi = 0 there); m[3] = 0 since Phi is harmonic.
  std::array<int, 4> m = {1, 0, 0, 0};
  int cp_found = 1;
  std::array<int, 4> betti = kKnotComplementBetti;
  bool euler_ok = false;
  bool index_balance_ok = false;  // m1 - m2 == 1
  bool morse_inequalities_ok = false;
  bool incomplete_search = true;
  int degenerate_points = 0;
  std::optional<int> t_known;
  std::optional<bool> bound_ok;
  std::optional<int> margin;
  std::vector<std::string> notes;

  int euler_sum() const { return m[0] - m[1] + m[2] - m[3]; }
};

/// Counts finite critical points by index and evaluates the Euler identity
/// and the index balance. Finite points of index 0 or 3 are impossible for a
/// harmonic potential and raise IndexOutOfRange.
inline MorseReport assemble_report(const std::string& knot,
                                   const std::vector<CriticalPoint>& crit) {
  MorseReport r;
  r.knot = knot;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const int idx = crit[i].index;
    if (idx == 0 || idx == 3)
      throw Error(ErrorCode::kIndexOutOfRange,
                  "finite critical point " + std::to_string(i) + " has index " +
                      std::to_string(idx) +
                      "; a harmonic function has no interior extrema");
    if (idx == 1 || idx == 2)
      ++r.m[idx];
    else
      ++r.degenerate_points;
  }
  r.cp_found = r.m[0] + r.m[1] + r.m[2] + r.m[3];
  r.euler_ok = r.euler_sum() == 0;
  r.index_balance_ok = r.m[1] - r.m[2] == 1;
  r.morse_inequalities_ok = true;
  for (int i = 0; i < 4; ++i)
    r.morse_inequalities_ok = r.morse_inequalities_ok && r.m[i] >= r.betti[i];
  r.incomplete_search = !r.index_balance_ok;
  if (r.degenerate_points > 0)
    r.notes.push_back(std::to_string(r.degenerate_points) +
                      " degenerate critical point(s) left unclassified; "
                      "enable the density perturbation");
  if (!r.index_balance_ok)
    r.notes.push_back("m1 - m2 = " + std::to_string(r.m[1] - r.m[2]) +
                      " != 1: search incomplete, refine the grid");
  if (r.m[1] < 1)
    r.notes.push_back("no index-1 point found although one always exists");
  if (r.m[2] == 0)
    r.notes.push_back("no index-2 points: consistent only with tunnel number 0");
  return r;
}

struct CatalogEntry {
  int tunnel_number = 0;
  std::string provenance;
};

/// Known tunnel numbers. Torus knots T(p, q) with |p|, |q| >= 2 have tunnel
/// number 1; T(p, +-1) and T(+-1, q) are unknots.
class TunnelCatalog {
 public:
  TunnelCatalog() {
    entries_["unknot"] = {0, "the unknot bounds a disk; no tunnels needed"};
    entries_["trefoil"] = {1, "trefoil is the torus knot T(2,3)"};
  }

  void add(const std::string& label, CatalogEntry e) { entries_[label] = std::move(e); }

  std::optional<CatalogEntry> find(const std::string& label) const {
    if (auto it = entries_.find(label); it != entries_.end()) return it->second;
    int p = 0, q = 0;
    if (parse_torus(label, p, q)) {
      if (std::min(std::abs(p), std::abs(q)) <= 1)
        return CatalogEntry{0, "torus knot with |p| or |q| <= 1 is the unknot"};
      return CatalogEntry{1, "torus knots have tunnel number 1"};
    }
    return std::nullopt;
  }

 private:
  static bool parse_torus(const std::string& s, int& p, int& q) {
    if (s.rfind("torus(", 0) != 0 || s.back() != ')') return false;
    const std::string body = s.substr(6, s.size() - 7);
    const auto comma = body.find(',');
    if (comma == std::string::npos) return false;
    try {
      std::size_t used = 0;
      p = std::stoi(body.substr(0, comma), &used);
      if (used != comma) return false;
      const std::string rest = body.substr(comma + 1);
      q = std::stoi(rest, &used);
      if (used != rest.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
    if (p == 0 || q == 0) return false;
    int a = std::abs(p), b = std::abs(q);
    while (b) {
      const int t = a % b;
      a = b;
      b = t;
    }
    return a == 1;
  }

  std::map<std::string, CatalogEntry> entries_;
};

inline std::optional<int> catalog_lookup(const std::string& label,
                                         const TunnelCatalog& catalog = {}) {
  if (auto e = catalog.find(label)) return e->tunnel_number;
  return std::nullopt;
}

struct BoundVerdict {
  bool pass = false;
  int margin = 0;  // cp_found - (2t + 2)
  std::string note;
};

/// cp >= 2t + 2. The bound is a theorem, so a failing verdict is reported as
/// missed critical points.
inline BoundVerdict verify_bound(const MorseReport& r, int t) {
  if (!r.index_balance_ok)
    throw Error(ErrorCode::kUnreliableCount,
                "m1 - m2 != 1; the critical count is incomplete");
  BoundVerdict v;
  v.margin = r.cp_found - (2 * t + 2);
  v.pass = v.margin >= 0;
  v.note = v.pass ? "cp_found >= 2t + 2"
                  : "search incomplete: found fewer critical points than the "
                    "lower bound 2t + 2 guarantees";
  return v;
}

/// Looks the knot up in the catalog and fills t_known / bound_ok / margin.
inline void attach_bound(MorseReport& r, const TunnelCatalog& catalog = {}) {
  const std::optional<int> t = catalog_lookup(r.knot, catalog);
  if (!t) {
    r.notes.push_back("knot not in tunnel catalog; bound check skipped");
    return;
  }
  r.t_known = *t;
  if (!r.index_balance_ok) {
    r.notes.push_back("bound check skipped: count unreliable");
    return;
  }
  const BoundVerdict v = verify_bound(r, *t);
  r.bound_ok = v.pass;
  r.margin = v.margin;
  if (!v.pass) r.notes.push_back(v.note);
}

}  // namespace knotmorse
