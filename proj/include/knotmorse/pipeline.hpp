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

// End-to-end runs shared by the command-line tool and the acceptance suite.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "knotmorse/critical.hpp"
#include "knotmorse/crossings.hpp"
#include "knotmorse/curve.hpp"
#include "knotmorse/flow.hpp"
#include "knotmorse/io.hpp"
#include "knotmorse/morse.hpp"

namespace knotmorse {

struct RunConfig {
  std::string knot_path;
  std::string knot_text;  // file contents; filled by load_knot
  Vec3 point;
  SearchConfig search;
  FlowConfig flow;
  std::string out_dir;
  std::vector<std::string> formats;
  std::uint64_t seed = 1;
  int census_samples = 200;
  bool use_cache = true;
};

inline KnotCurve load_knot(RunConfig& cfg) {
  cfg.knot_text = io::read_file(cfg.knot_path);
  return io::knot_from_json(io::parse_text(cfg.knot_text));
}

inline io::json run_metadata(const KnotCurve& k, const RunConfig& cfg) {
  const QuadratureConfig& q = cfg.search.quadrature;
  return {{"units",
           "unit line charge density, no physical constants; lengths in knot "
           "file units; phi = integral of |r'| / |x - r| dt"},
          {"knot", k.label()},
          {"arc_length", k.arc_length()},
          {"diameter", k.diameter()},
          {"min_self_distance", k.min_self_distance()},
          {"tube_radius", tube_radius(k, cfg.flow)},
          {"quadrature", {{"initial_nodes", q.initial_nodes},
                          {"max_nodes", q.max_nodes},
                          {"tol_q", q.tolerance}}},
          {"search", {{"n_grid", cfg.search.n_grid},
                      {"tol_res", residual_tolerance(k, cfg.search)},
                      {"tol_deg", cfg.search.tol_deg},
                      {"r_dup", dedup_radius(k, cfg.search)}}},
          {"flow", {{"launch_offset", cfg.flow.launch_offset_scale * k.diameter()},
                    {"rtol", cfg.flow.rtol},
                    {"atol", cfg.flow.atol},
                    {"far_field_radius", far_field_radius(k, cfg.flow)},
                    {"infinity_threshold", infinity_threshold(k, cfg.flow)}}}};
}

inline std::vector<std::string> metadata_lines(const io::json& meta) {
  std::vector<std::string> out;
  for (const auto& [key, value] : meta.items()) out.push_back(key + " " + value.dump());
  return out;
}

inline std::string scan_cache_key(const RunConfig& cfg) {
  const SearchConfig& s = cfg.search;
  const QuadratureConfig& q = s.quadrature;
  std::ostringstream ss;
  ss.precision(17);
  ss << cfg.knot_text << "|grid=" << s.n_grid << "|iter=" << s.max_iterations
     << "|bt=" << s.max_backtracks << "|res=" << s.tol_res_scale
     << "|deg=" << s.tol_deg << "|dup=" << s.r_dup_scale
     << "|refine=" << s.refinement_passes << "|n0=" << q.initial_nodes
     << "|nmax=" << q.max_nodes << "|tolq=" << q.tolerance
     << "|pert=" << q.perturbation_amplitude << ',' << q.perturbation_center[0]
     << ',' << q.perturbation_center[1] << ',' << q.perturbation_center[2] << ','
     << q.perturbation_direction[0] << ',' << q.perturbation_direction[1] << ','
     << q.perturbation_direction[2];
  return io::hex64(io::fnv1a(ss.str()));
}

struct ScanRun {
  SearchOutcome outcome;
  bool from_cache = false;
};

/// Critical-point search, reusing a cached result in the output directory
/// when the knot text and search settings hash to an existing entry.
inline ScanRun run_scan(const KnotCurve& k, const RunConfig& cfg) {
  ScanRun run;
  std::filesystem::path cache;
  if (cfg.use_cache && !cfg.out_dir.empty()) {
    cache = std::filesystem::path(cfg.out_dir) /
            ("scan_cache_" + scan_cache_key(cfg) + ".json");
    if (std::filesystem::exists(cache)) {
      const io::json j = io::parse_text(io::read_file(cache.string()));
      for (const io::json& p : j.at("critical_points"))
        run.outcome.points.push_back(io::critical_from_json(p));
      run.outcome.passes = j.at("passes").get<int>();
      run.outcome.final_grid = j.at("final_grid").get<int>();
      run.outcome.balanced = j.at("balanced").get<bool>();
      run.from_cache = true;
      return run;
    }
  }
  run.outcome = search_critical_points(k, cfg.search);
  if (!cache.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    io::json j;
    j["critical_points"] = io::json::array();
    for (const CriticalPoint& c : run.outcome.points)
      j["critical_points"].push_back(io::to_json(c));
    j["passes"] = run.outcome.passes;
    j["final_grid"] = run.outcome.final_grid;
    j["balanced"] = run.outcome.balanced;
    std::ofstream(cache) << j.dump() << '\n';
  }
  return run;
}

inline io::json scan_document(const KnotCurve& k, const RunConfig& cfg,
                              const ScanRun& scan) {
  io::json doc;
  doc["metadata"] = run_metadata(k, cfg);
  doc["metadata"]["passes"] = scan.outcome.passes;
  doc["metadata"]["final_grid"] = scan.outcome.final_grid;
  doc["critical_points"] = io::json::array();
  for (const CriticalPoint& c : scan.outcome.points)
    doc["critical_points"].push_back(io::to_json(c));
  return doc;
}

struct ReportRun {
  MorseReport report;
  Tunneling tunneling;
  std::optional<CensusStats> census;
  int crossings = -1;
  io::json document;
};

/// scan -> separatrices -> counts and invariants -> bound verdict, plus the
/// crossing diagnostic and (when census_samples > 0) the descending census.
inline ReportRun run_report(const KnotCurve& k, const RunConfig& cfg) {
  ReportRun run;
  const ScanRun scan = run_scan(k, cfg);
  const std::vector<CriticalPoint>& pts = scan.outcome.points;
  run.report = assemble_report(k.label(), pts);
  attach_bound(run.report);
  run.tunneling = build_tunneling(k, pts, cfg.flow);
  const Vec3 dir = default_projection_direction();
  run.crossings = crossing_upper_bound(k, dir);
  if (cfg.census_samples > 0)
    run.census = descending_flow_census(k, cfg.census_samples, cfg.flow, cfg.seed,
                                        pts, run.tunneling.gammas);

  io::json doc = io::to_json(run.report);
  doc["gamma_arcs"] = run.tunneling.gamma_count();
  doc["theta_loops"] = run.tunneling.theta_count();
  int gamma_tube = 0, theta_far = 0;
  double violation = 0;
  for (const FlowArc& a : run.tunneling.gammas) {
    gamma_tube += a.termination == Termination::kKnotTube;
    violation = std::max(violation, a.max_monotonicity_violation);
  }
  for (const FlowArc& a : run.tunneling.thetas) {
    theta_far += a.termination == Termination::kFarField;
    violation = std::max(violation, a.max_monotonicity_violation);
  }
  doc["gamma_branches_in_tube"] = gamma_tube;
  doc["theta_branches_far_field"] = theta_far;
  doc["arc_monotonicity_violation"] = violation;
  doc["arc_anomalies"] = run.tunneling.anomalies;
  doc["crossing_upper_bound"] = run.crossings;
  doc["crossing_direction"] = io::vec_json(dir);
  if (run.census) {
    doc["census"] = {{"samples", run.census->samples},
                     {"far_field", run.census->far_field},
                     {"knot_tube", run.census->knot_tube},
                     {"near_critical", run.census->near_critical},
                     {"max_steps", run.census->max_steps},
                     {"far_field_fraction", run.census->far_field_fraction()},
                     {"seed", cfg.seed}};
  }
  doc["critical_points"] = scan_document(k, cfg, scan)["critical_points"];
  doc["metadata"] = run_metadata(k, cfg);
  doc["metadata"]["passes"] = scan.outcome.passes;
  doc["metadata"]["final_grid"] = scan.outcome.final_grid;
  run.document = std::move(doc);
  return run;
}

}  // namespace knotmorse
