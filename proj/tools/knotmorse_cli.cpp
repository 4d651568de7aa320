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

// knotmorse: critical points of the electrostatic potential of a charged knot.
//
//   knotmorse eval   --knot K.json --point x,y,z
//   knotmorse scan   --knot K.json [--grid N] [--out DIR] [--format json|csv]
//   knotmorse flow   --knot K.json --out DIR [--format obj|csv]
//   knotmorse report --knot K.json [--out DIR] [--seed S]
//   knotmorse oracle --knot K.json --point x,y,z | --scan N
//
// Exit codes: 0 ok, 2 evaluation precondition, 3 parse, 4 incomplete search,
// 5 internal inconsistency.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "knotmorse/oracle.hpp"
#include "knotmorse/pipeline.hpp"

namespace km = knotmorse;
using km::io::json;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitParse = 3;
constexpr int kExitIncomplete = 4;
constexpr int kExitInternal = 5;

km::Vec3 parse_point(const std::string& s) {
  km::Vec3 p;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',')
    throw km::Error(km::ErrorCode::kParse, "--point expects x,y,z");
  return p;
}

bool wants(const km::RunConfig& cfg, const std::string& f) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), f) != cfg.formats.end();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

int cmd_eval(km::RunConfig& cfg) {
  const km::KnotCurve k = km::load_knot(cfg);
  const km::FieldSample s = km::field_sample(k, cfg.point, cfg.search.quadrature);
  json j = km::io::to_json(s);
  j["metadata"] = km::run_metadata(k, cfg);
  if (!s.converged) j["metadata"]["quadrature_converged"] = false;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_scan(km::RunConfig& cfg) {
  const km::KnotCurve k = km::load_knot(cfg);
  const km::ScanRun scan = km::run_scan(k, cfg);
  const json doc = km::scan_document(k, cfg, scan);
  if (cfg.out_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    const std::filesystem::path dir(cfg.out_dir);
    if (wants(cfg, "json")) write_text(dir / "critical_points.json", doc.dump(2) + "\n");
    if (wants(cfg, "csv")) {
      std::ostringstream ss;
      km::io::write_critical_csv(ss, scan.outcome.points,
                                 km::metadata_lines(doc["metadata"]));
      write_text(dir / "critical_points.csv", ss.str());
    }
  }
  const km::IndexCounts c = km::count_indices(scan.outcome.points);
  std::fprintf(stderr, "%zu finite critical points (m1=%d, m2=%d)%s\n",
               scan.outcome.points.size(), c.index1, c.index2,
               scan.from_cache ? " [cached]" : "");
  return c.index1 - c.index2 == 1 && c.other == 0 ? 0 : kExitIncomplete;
}

int cmd_flow(km::RunConfig& cfg) {
  const km::KnotCurve k = km::load_knot(cfg);
  const km::ScanRun scan = km::run_scan(k, cfg);
  const km::Tunneling t = km::build_tunneling(k, scan.outcome.points, cfg.flow);
  const auto meta = km::metadata_lines(km::run_metadata(k, cfg));
  const std::filesystem::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
  if (wants(cfg, "obj")) {
    std::ostringstream ss;
    km::io::write_arcs_obj(ss, t, meta);
    write_text(dir / "arcs.obj", ss.str());
  }
  if (wants(cfg, "csv")) {
    std::ostringstream ss;
    km::io::write_arcs_csv(ss, t, meta);
    write_text(dir / "arcs.csv", ss.str());
  }
  std::fprintf(stderr, "%d gamma arcs, %d theta loops, %zu anomalies\n",
               t.gamma_count(), t.theta_count(), t.anomalies.size());
  for (const std::string& a : t.anomalies) std::fprintf(stderr, "  %s\n", a.c_str());
  return t.consistent() ? 0 : kExitIncomplete;
}

int cmd_report(km::RunConfig& cfg) {
  const km::KnotCurve k = km::load_knot(cfg);
  const km::ReportRun run = km::run_report(k, cfg);
  const std::string text = run.document.dump(2) + "\n";
  if (!cfg.out_dir.empty()) write_text(std::filesystem::path(cfg.out_dir) / "report.json", text);
  std::cout << text;
  return run.report.index_balance_ok ? 0 : kExitIncomplete;
}

int cmd_oracle(km::RunConfig& cfg, int scan_grid) {
  const km::KnotCurve k = km::load_knot(cfg);
  json j;
  if (scan_grid > 0) {
    j["basins"] = json::array();
    for (const auto& b : km::oracle::brute_scan(k, scan_grid, km::default_tube(k).radius))
      j["basins"].push_back({{"center", km::io::vec_json(b.center)},
                             {"min_grad", b.min_grad},
                             {"nodes", b.nodes}});
  } else {
    km::check_evaluable(k, cfg.point);
    j["x"] = km::io::vec_json(cfg.point);
    j["phi"] = km::oracle::reference_potential(k, cfg.point);
    j["fd_grad"] = km::io::vec_json(km::oracle::fd_gradient(k, cfg.point));
    j["fd_hess"] = km::io::mat_json(km::oracle::fd_hessian(k, cfg.point));
  }
  j["metadata"] = km::run_metadata(k, cfg);
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Critical points of the electrostatic potential of a knot"};
  app.require_subcommand(1);

  km::RunConfig cfg;
  std::string point = "0,0,0";
  int grid = cfg.search.n_grid;
  double tol_q = cfg.search.quadrature.tolerance;
  double tol_res = cfg.search.tol_res_scale;
  double far_field = cfg.flow.far_field_scale;
  int scan_grid = 0;
  unsigned threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--knot", cfg.knot_path, "knot definition file (JSON)")
        ->required();
    sub->add_option("--point", point, "evaluation point x,y,z");
    sub->add_option("--grid", grid, "seed grid cells per axis")
        ->check(CLI::Range(8, 1024));
    sub->add_option("--tol-q", tol_q, "relative quadrature tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-res", tol_res,
                    "Newton residual tolerance in units of L / diameter^2")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.formats, "json|csv|obj (repeatable)")
        ->check(CLI::IsMember({"json", "csv", "obj"}));
    sub->add_option("--seed", cfg.seed, "seed for randomized sampling");
    sub->add_option("--far-field", far_field,
                    "far-field radius in units of the diameter")
        ->check(CLI::Range(10.0001, 1e9));
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
  };

  auto* eval = app.add_subcommand("eval", "potential, gradient and Hessian at a point");
  auto* scan = app.add_subcommand("scan", "locate and classify critical points");
  auto* flow = app.add_subcommand("flow", "trace separatrices of the critical points");
  auto* report = app.add_subcommand("report", "full pipeline and bound verdict");
  auto* oracle = app.add_subcommand("oracle", "reference quadrature and brute-force scan");
  for (auto* sub : {eval, scan, flow, report, oracle}) add_common(sub);
  report->add_option("--census", cfg.census_samples,
                     "random backward flows in the census (0 = skip)");
  oracle->add_option("--scan", scan_grid, "brute-force |grad| scan lattice size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    cfg.point = parse_point(point);
    cfg.search.n_grid = grid;
    cfg.search.quadrature.tolerance = tol_q;
    cfg.search.tol_res_scale = tol_res;
    cfg.search.threads = threads;
    cfg.flow.quadrature = cfg.search.quadrature;
    cfg.flow.tol_res_scale = tol_res;
    cfg.flow.far_field_scale = far_field;
    cfg.flow.threads = threads;
    if (cfg.formats.empty()) {
      if (*flow)
        cfg.formats = {"obj", "csv"};
      else
        cfg.formats = {"json"};
    }
    if (*eval) return cmd_eval(cfg);
    if (*scan) return cmd_scan(cfg);
    if (*flow) return cmd_flow(cfg);
    if (*report) return cmd_report(cfg);
    return cmd_oracle(cfg, scan_grid);
  } catch (const km::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case km::ErrorCode::kTooCloseToKnot: return kExitPrecondition;
      case km::ErrorCode::kParse:
      case km::ErrorCode::kInvalidArgument:
      case km::ErrorCode::kNotAKnot: return kExitParse;
      case km::ErrorCode::kUnreliableCount: return kExitIncomplete;
      default: return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
