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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "knotmorse/pipeline.hpp"

using namespace knotmorse;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_error_code(const std::string& text, std::string* what = nullptr) {
  try {
    io::knot_from_json(io::parse_text(text));
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCode::kInvalidArgument;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("knotmorse_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string knot_file(const std::string& name) {
  return std::string(KNOT_DIR) + "/" + name;
}

}  // namespace

TEST(KnotJson, TorusKinds) {
  const KnotCurve k = io::knot_from_json(
      io::parse_text(R"({"kind": "torus", "p": 2, "q": 3, "R": 2.0, "r": 1.0})"));
  EXPECT_EQ(k.label(), "torus(2,3)");
  EXPECT_NEAR(k.arc_length(), 31.8986006664123, 1e-11);
  const KnotCurve named = io::knot_from_json(
      io::parse_text(R"({"kind": "torus", "p": 2, "q": 3, "R": 2, "r": 1, "label": "trefoil"})"));
  EXPECT_EQ(named.label(), "trefoil");
  const KnotCurve u = io::knot_from_json(
      io::parse_text(R"({"kind": "torus", "p": 1, "q": 0, "R": 1, "r": 0})"));
  EXPECT_EQ(u.label(), "unknot");
}

TEST(KnotJson, FourierAndSamples) {
  const KnotCurve f = io::knot_from_json(io::parse_text(
      R"({"kind": "fourier", "label": "trefoil", "harmonics": [[0,1,1,0,0,0],[0,2,-2,0,0,0],[0,0,0,0,0,-1]]})"));
  EXPECT_EQ(f.label(), "trefoil");
  EXPECT_NEAR(f.eval(0).position.y, -1, 1e-15);
  const KnotCurve s = io::knot_from_json(io::parse_text(
      R"({"kind": "samples", "points": [[1,0,0],[0,1,0.2],[-1,0,0],[0,-1,-0.2]]})"));
  EXPECT_EQ(s.label(), "samples");
  EXPECT_NEAR(distance(s.eval(0).position, Vec3{1, 0, 0}), 0, 1e-15);
}

TEST(KnotJson, SampleFilesLoad) {
  for (const char* f : {"unknot.json", "trefoil.json", "torus_3_4.json",
                        "fourier_trefoil.json", "figure_eight.json", "sampled_trefoil.json"}) {
    EXPECT_NO_THROW(io::knot_from_json(io::parse_text(io::read_file(knot_file(f))))) << f;
  }
  const KnotCurve s = io::knot_from_json(io::parse_text(io::read_file(knot_file("sampled_trefoil.json"))));
  EXPECT_NEAR(s.arc_length(), 31.8986006664123, 1e-3);
}

TEST(KnotJson, ErrorsNameTheKey) {
  std::string what;
  EXPECT_EQ(parse_error_code(R"({"kind": "torus", "p": 2, "q": 3, "R": 2})", &what),
            ErrorCode::kParse);
  EXPECT_NE(what.find("\"r\""), std::string::npos) << what;
  EXPECT_EQ(parse_error_code(R"({"kind": "torus", "R": 2, "r": 1})", &what), ErrorCode::kParse);
  EXPECT_NE(what.find("\"p\""), std::string::npos) << what;
  EXPECT_EQ(parse_error_code(R"({"kind": "torus", "p": 2.5, "q": 3, "R": 2, "r": 1})", &what),
            ErrorCode::kParse);
  EXPECT_NE(what.find("integer"), std::string::npos) << what;
  EXPECT_EQ(parse_error_code(R"({"p": 2})", &what), ErrorCode::kParse);
  EXPECT_NE(what.find("kind"), std::string::npos);
  EXPECT_EQ(parse_error_code(R"({"kind": "spiral"})"), ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"kind": "fourier", "harmonics": [[1,2,3]]})"), ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"kind": "samples", "points": [[1,2,"a"]]})"), ErrorCode::kParse);
  EXPECT_EQ(parse_error_code(R"({"kind": "torus", "p": 2, "q": 3, "R": 2, "r": 1, "label": 4})"),
            ErrorCode::kParse);
  EXPECT_EQ(parse_error_code("[1, 2]"), ErrorCode::kParse);
  EXPECT_EQ(parse_error_code("{not json"), ErrorCode::kParse);
}

TEST(KnotJson, GeometryErrorsKeepTheirCodes) {
  EXPECT_EQ(parse_error_code(R"({"kind": "torus", "p": 2, "q": 4, "R": 2, "r": 1})"),
            ErrorCode::kNotAKnot);
  EXPECT_EQ(parse_error_code(R"({"kind": "torus", "p": 2, "q": 3, "R": 1, "r": 2})"),
            ErrorCode::kInvalidArgument);
}

TEST(ReadFile, MissingFileIsParseError) {
  try {
    io::read_file("/nonexistent/knot.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(Json, CriticalPointRoundTripIsExact) {
  CriticalPoint c;
  c.x = {0.1, -2.0 / 3.0, 1e-17};
  c.phi = 15.857635692504322;
  c.residual = 3.7e-16;
  c.eigvals = {-3.9383854218799725, -1.7073803505628768, 5.645765772442852};
  c.eigvecs = {Vec3{1, 0, 0}, Vec3{0, 0.6, 0.8}, Vec3{0, -0.8, 0.6}};
  c.index = 2;
  c.nondeg_margin = 0.23;
  const CriticalPoint back = io::critical_from_json(io::parse_text(io::to_json(c).dump()));
  EXPECT_EQ(back.x, c.x);
  EXPECT_EQ(back.phi, c.phi);
  EXPECT_EQ(back.residual, c.residual);
  EXPECT_EQ(back.eigvals, c.eigvals);
  EXPECT_EQ(back.eigvecs, c.eigvecs);
  EXPECT_EQ(back.index, 2);
  EXPECT_FALSE(back.degenerate);
  EXPECT_THROW(io::critical_from_json(io::json{{"x", {1, 2, 3}}}), Error);
}

TEST(Json, ReportOmitsAbsentOptionals) {
  MorseReport r;
  r.knot = "figure-eight";
  io::json j = io::to_json(r);
  EXPECT_FALSE(j.contains("t_known"));
  EXPECT_FALSE(j.contains("bound_ok"));
  r.t_known = 1;
  r.bound_ok = true;
  r.margin = 2;
  j = io::to_json(r);
  EXPECT_EQ(j["t_known"], 1);
  EXPECT_EQ(j["bound_ok"], true);
  EXPECT_EQ(j["margin"], 2);
  EXPECT_EQ(j["betti"], io::json::array({1, 1, 0, 0}));
}

TEST(Csv, CriticalPointsHaveMetadataAndHeader) {
  CriticalPoint c;
  c.index = 1;
  std::ostringstream os;
  io::write_critical_csv(os, {c, c}, {"knot unknot"});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# knot unknot");
  std::getline(is, line);
  EXPECT_EQ(line.rfind("x,y,z,phi,", 0), 0u);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 18);
  }
  EXPECT_EQ(rows, 2);
}

TEST(Arcs, NamesAndExports) {
  Tunneling t;
  FlowArc g;
  g.kind = ArcKind::kTunnelGamma;
  g.polyline = {{{0, 0, 0}, 1.0}, {{0, 0, 1}, 2.0}};
  g.termination = Termination::kKnotTube;
  g.branch = 1;
  t.gammas.push_back(g);
  g.branch = -1;
  t.gammas.push_back(g);
  FlowArc th = g;
  th.kind = ArcKind::kThetaLoop;
  th.branch = 1;
  th.polyline.push_back({{0, 0, 2}, 0.5});
  t.thetas.push_back(th);
  const auto names = io::named_arcs(t);
  ASSERT_EQ(names.size(), 3u);
  EXPECT_EQ(names[0].first, "gamma_0_+");
  EXPECT_EQ(names[1].first, "gamma_0_-");
  EXPECT_EQ(names[2].first, "theta_0_+");

  std::ostringstream obj;
  io::write_arcs_obj(obj, t, {"m"});
  const std::string s = obj.str();
  EXPECT_NE(s.find("o gamma_0_+\n"), std::string::npos);
  EXPECT_NE(s.find("l 1 2\n"), std::string::npos);
  EXPECT_NE(s.find("l 3 4\n"), std::string::npos);
  EXPECT_NE(s.find("l 5 6 7\n"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), 'v'), 7);

  std::ostringstream csv;
  io::write_arcs_csv(csv, t, {});
  std::istringstream is(csv.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "arc,step,x,y,z,phi");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 7);
}

TEST(Hash, Fnv1aReferenceVectors) {
  EXPECT_EQ(io::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(io::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(io::fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(io::hex64(0xabcULL), "0000000000000abc");
}

TEST(Pipeline, CacheKeyTracksInputs) {
  RunConfig a;
  a.knot_text = R"({"kind": "torus", "p": 1, "q": 0, "R": 1, "r": 0})";
  RunConfig b = a;
  EXPECT_EQ(scan_cache_key(a), scan_cache_key(b));
  b.search.n_grid = 12;
  EXPECT_NE(scan_cache_key(a), scan_cache_key(b));
  b = a;
  b.search.quadrature.tolerance = 1e-9;
  EXPECT_NE(scan_cache_key(a), scan_cache_key(b));
  b = a;
  b.knot_text += " ";
  EXPECT_NE(scan_cache_key(a), scan_cache_key(b));
}

TEST(Pipeline, ScanCacheRoundTrip) {
  const fs::path dir = scratch_dir("cache");
  RunConfig cfg;
  cfg.knot_path = knot_file("unknot.json");
  cfg.out_dir = dir.string();
  cfg.search.n_grid = 12;
  const KnotCurve k = load_knot(cfg);
  const ScanRun first = run_scan(k, cfg);
  EXPECT_FALSE(first.from_cache);
  const ScanRun second = run_scan(k, cfg);
  EXPECT_TRUE(second.from_cache);
  ASSERT_EQ(first.outcome.points.size(), second.outcome.points.size());
  for (std::size_t i = 0; i < first.outcome.points.size(); ++i) {
    EXPECT_EQ(first.outcome.points[i].x, second.outcome.points[i].x);
    EXPECT_EQ(first.outcome.points[i].phi, second.outcome.points[i].phi);
    EXPECT_EQ(first.outcome.points[i].index, second.outcome.points[i].index);
  }
  EXPECT_EQ(first.outcome.balanced, second.outcome.balanced);
  cfg.use_cache = false;
  EXPECT_FALSE(run_scan(k, cfg).from_cache);
  fs::remove_all(dir);
}

TEST(Pipeline, UnknotReportDocument) {
  RunConfig cfg;
  cfg.knot_path = knot_file("unknot.json");
  cfg.census_samples = 20;
  const KnotCurve k = load_knot(cfg);
  const ReportRun run = run_report(k, cfg);
  const io::json& d = run.document;
  EXPECT_EQ(d["cp_found"], 2);
  EXPECT_EQ(d["m"], io::json::array({1, 1, 0, 0}));
  EXPECT_EQ(d["bound_ok"], true);
  EXPECT_EQ(d["margin"], 0);
  EXPECT_EQ(d["gamma_arcs"], 0);
  EXPECT_EQ(d["theta_loops"], 1);
  EXPECT_EQ(d["theta_branches_far_field"], 2);
  EXPECT_EQ(d["crossing_upper_bound"], 0);
  EXPECT_EQ(d["census"]["samples"], 20);
  EXPECT_EQ(d["critical_points"].size(), 1u);
  EXPECT_TRUE(d["metadata"].contains("units"));
  EXPECT_TRUE(d["metadata"].contains("tube_radius"));
}

TEST(Pipeline, MetadataLines) {
  const io::json meta = {{"knot", "unknot"}, {"n", 3}};
  const std::vector<std::string> lines = metadata_lines(meta);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[0].find("knot"), std::string::npos);
}
