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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "knotmorse/critical.hpp"
#include "knotmorse/curve.hpp"
#include "knotmorse/error.hpp"
#include "knotmorse/field.hpp"
#include "knotmorse/flow.hpp"
#include "knotmorse/morse.hpp"

namespace knotmorse::io {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::kParse, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number())
    throw Error(ErrorCode::kParse, std::string("key \"") + key +
                                       "\" must be a number");
  return v.get<double>();
}

inline int integer(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number_integer())
    throw Error(ErrorCode::kParse, std::string("key \"") + key +
                                       "\" must be an integer");
  return v.get<int>();
}

template <std::size_t N>
std::array<double, N> fixed_row(const json& row, const char* key) {
  if (!row.is_array() || row.size() != N)
    throw Error(ErrorCode::kParse, std::string("key \"") + key +
                                       "\" needs rows of " + std::to_string(N) +
                                       " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!row[i].is_number())
      throw Error(ErrorCode::kParse,
                  std::string("key \"") + key + "\" has a non-numeric entry");
    out[i] = row[i].get<double>();
  }
  return out;
}

}  // namespace detail

/// Builds a curve from a knot definition:
///   {"kind": "torus", "p": 2, "q": 3, "R": 2.0, "r": 1.0}
///   {"kind": "fourier", "harmonics": [[ax,bx,ay,by,az,bz], ...]}
///   {"kind": "samples", "points": [[x,y,z], ...]}
/// An optional "label" names the knot for the tunnel catalog.
inline KnotCurve knot_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "knot file must be an object");
  const json& kind = detail::require(j, "kind");
  if (!kind.is_string())
    throw Error(ErrorCode::kParse, "key \"kind\" must be a string");
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string())
      throw Error(ErrorCode::kParse, "key \"label\" must be a string");
    label = j["label"].get<std::string>();
  }
  const std::string k = kind.get<std::string>();
  if (k == "torus") {
    const int p = detail::integer(j, "p");
    const int q = detail::integer(j, "q");
    const double major = detail::number(j, "R");
    const double minor = detail::number(j, "r");
    KnotCurve c = make_torus_knot(p, q, major, minor);
    if (label.empty()) return c;
    return KnotCurve(c.kind(), label, Validation::kOn);
  }
  if (k == "fourier") {
    const json& h = detail::require(j, "harmonics");
    if (!h.is_array() || h.empty())
      throw Error(ErrorCode::kParse, "key \"harmonics\" must be a non-empty array");
    std::vector<std::array<double, 6>> rows;
    for (const json& row : h) rows.push_back(detail::fixed_row<6>(row, "harmonics"));
    return make_fourier_knot(std::move(rows), label.empty() ? "fourier" : label);
  }
  if (k == "samples") {
    const json& pts = detail::require(j, "points");
    if (!pts.is_array())
      throw Error(ErrorCode::kParse, "key \"points\" must be an array");
    std::vector<Vec3> points;
    for (const json& row : pts) {
      const auto a = detail::fixed_row<3>(row, "points");
      points.push_back({a[0], a[1], a[2]});
    }
    return make_sampled_knot(std::move(points), label.empty() ? "samples" : label);
  }
  throw Error(ErrorCode::kParse, "key \"kind\" has unknown value \"" + k + "\"");
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 vec_from_json(const json& j, const char* key) {
  const auto a = detail::fixed_row<3>(j, key);
  return {a[0], a[1], a[2]};
}

inline json mat_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return rows;
}

inline json to_json(const FieldSample& s) {
  return {{"x", vec_json(s.x)},       {"phi", s.phi},
          {"grad", vec_json(s.grad)}, {"hess", mat_json(s.hess)},
          {"nodes_used", s.nodes_used}, {"est_error", s.est_error}};
}

inline json to_json(const CriticalPoint& c) {
  json vecs = json::array();
  for (const Vec3& v : c.eigvecs) vecs.push_back(vec_json(v));
  return {{"x", vec_json(c.x)},
          {"phi", c.phi},
          {"residual", c.residual},
          {"eigvals", json::array({c.eigvals[0], c.eigvals[1], c.eigvals[2]})},
          {"eigvecs", vecs},
          {"index", c.index},
          {"nondeg_margin", c.nondeg_margin}};
}

inline CriticalPoint critical_from_json(const json& j) {
  CriticalPoint c;
  c.x = vec_from_json(detail::require(j, "x"), "x");
  c.phi = detail::number(j, "phi");
  c.residual = detail::number(j, "residual");
  c.eigvals = detail::fixed_row<3>(detail::require(j, "eigvals"), "eigvals");
  const json& vecs = detail::require(j, "eigvecs");
  if (!vecs.is_array() || vecs.size() != 3)
    throw Error(ErrorCode::kParse, "key \"eigvecs\" needs 3 vectors");
  for (int i = 0; i < 3; ++i) c.eigvecs[i] = vec_from_json(vecs[i], "eigvecs");
  c.index = detail::integer(j, "index");
  c.nondeg_margin = detail::number(j, "nondeg_margin");
  c.degenerate = c.index < 0;
  return c;
}

inline json to_json(const MorseReport& r) {
  json j = {{"knot", r.knot},
            {"m", r.m},
            {"cp_found", r.cp_found},
            {"betti", r.betti},
            {"euler_ok", r.euler_ok},
            {"index_balance_ok", r.index_balance_ok}};
  if (r.t_known) j["t_known"] = *r.t_known;
  if (r.bound_ok) j["bound_ok"] = *r.bound_ok;
  if (r.margin) j["margin"] = *r.margin;
  j["notes"] = r.notes;
  j["morse_inequalities_ok"] = r.morse_inequalities_ok;
  j["incomplete_search"] = r.incomplete_search;
  return j;
}

/// CSV with the critical-point JSON columns flattened; '#' lines carry
/// metadata.
inline void write_critical_csv(std::ostream& os,
                               const std::vector<CriticalPoint>& pts,
                               const std::vector<std::string>& metadata) {
  for (const std::string& m : metadata) os << "# " << m << '\n';
  os << "x,y,z,phi,residual,eigval0,eigval1,eigval2,"
        "eigvec0_x,eigvec0_y,eigvec0_z,eigvec1_x,eigvec1_y,eigvec1_z,"
        "eigvec2_x,eigvec2_y,eigvec2_z,index,nondeg_margin\n";
  os << std::setprecision(17);
  for (const CriticalPoint& c : pts) {
    os << c.x.x << ',' << c.x.y << ',' << c.x.z << ',' << c.phi << ','
       << c.residual;
    for (double e : c.eigvals) os << ',' << e;
    for (const Vec3& v : c.eigvecs) os << ',' << v.x << ',' << v.y << ',' << v.z;
    os << ',' << c.index << ',' << c.nondeg_margin << '\n';
  }
}

inline std::string arc_name(const FlowArc& a, int ordinal) {
  const char* base = a.kind == ArcKind::kTunnelGamma ? "gamma"
                     : a.kind == ArcKind::kThetaLoop ? "theta"
                                                     : "path";
  return std::string(base) + "_" + std::to_string(ordinal) + "_" +
         (a.branch >= 0 ? "+" : "-");
}

/// Names arcs gamma_<i>_<+-> / theta_<j>_<+->, with i and j counting index-2
/// and index-1 points in list order.
inline std::vector<std::pair<std::string, const FlowArc*>> named_arcs(
    const Tunneling& t) {
  std::vector<std::pair<std::string, const FlowArc*>> out;
  for (std::size_t i = 0; i < t.gammas.size(); ++i)
    out.emplace_back(arc_name(t.gammas[i], static_cast<int>(i / 2)), &t.gammas[i]);
  for (std::size_t i = 0; i < t.thetas.size(); ++i)
    out.emplace_back(arc_name(t.thetas[i], static_cast<int>(i / 2)), &t.thetas[i]);
  return out;
}

/// Wavefront OBJ: one object per arc, vertices followed by one polyline.
inline void write_arcs_obj(std::ostream& os, const Tunneling& t,
                           const std::vector<std::string>& metadata) {
  for (const std::string& m : metadata) os << "# " << m << '\n';
  os << std::setprecision(17);
  long base = 1;
  for (const auto& [name, arc] : named_arcs(t)) {
    os << "o " << name << '\n';
    os << "# termination " << to_string(arc->termination) << '\n';
    for (const FlowPoint& p : arc->polyline)
      os << "v " << p.x.x << ' ' << p.x.y << ' ' << p.x.z << '\n';
    os << 'l';
    for (std::size_t i = 0; i < arc->polyline.size(); ++i)
      os << ' ' << base + static_cast<long>(i);
    os << '\n';
    base += static_cast<long>(arc->polyline.size());
  }
}

inline void write_arcs_csv(std::ostream& os, const Tunneling& t,
                           const std::vector<std::string>& metadata) {
  for (const std::string& m : metadata) os << "# " << m << '\n';
  os << "arc,step,x,y,z,phi\n";
  os << std::setprecision(17);
  for (const auto& [name, arc] : named_arcs(t))
    for (std::size_t i = 0; i < arc->polyline.size(); ++i) {
      const FlowPoint& p = arc->polyline[i];
      os << name << ',' << i << ',' << p.x.x << ',' << p.x.y << ',' << p.x.z
         << ',' << p.phi << '\n';
    }
}

/// 64-bit FNV-1a, stable across platforms (used for cache keys).
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace knotmorse::io
