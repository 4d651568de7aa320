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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs the full pipeline on the sample knots, so expect minutes.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "knotmorse/oracle.hpp"
#include "knotmorse/pipeline.hpp"

using namespace knotmorse;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    v.pass = false;
    v.detail += "; runtime over budget";
  }
  failures += !v.pass;
  std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name.c_str(),
              v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string knot_path(const std::string& name) {
  return std::string(KNOT_DIR) + "/" + name;
}

KnotCurve load(const std::string& name) {
  RunConfig cfg;
  cfg.knot_path = knot_path(name);
  return load_knot(cfg);
}

ReportRun report_for(const std::string& name) {
  RunConfig cfg;
  cfg.knot_path = knot_path(name);
  const KnotCurve k = load_knot(cfg);
  return run_report(k, cfg);
}

std::vector<Vec3> random_points(const KnotCurve& k, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  const Box b = search_region(k);
  const double rho = default_tube(k).radius;
  std::vector<Vec3> pts;
  while (static_cast<int>(pts.size()) < n) {
    Vec3 p;
    for (int a = 0; a < 3; ++a) p[a] = b.lo[a] + u(rng) * (b.hi[a] - b.lo[a]);
    if (k.distance_to(p) > rho) pts.push_back(p);
  }
  return pts;
}

double arc_violation(const ReportRun& r) {
  double v = r.census ? r.census->max_monotonicity_violation : 0.0;
  for (const FlowArc& a : r.tunneling.gammas) v = std::max(v, a.max_monotonicity_violation);
  for (const FlowArc& a : r.tunneling.thetas) v = std::max(v, a.max_monotonicity_violation);
  return v;
}

int run_cli(const std::string& args, std::string& out) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  char buf[4096];
  size_t n;
  out.clear();
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string counts(const MorseReport& r) {
  std::ostringstream ss;
  ss << "m=[" << r.m[0] << "," << r.m[1] << "," << r.m[2] << "," << r.m[3]
     << "] cp_found=" << r.cp_found;
  return ss.str();
}

}  // namespace

int main() {
  std::map<std::string, ReportRun> runs;

  criterion(1, "circle axis closed form", 1.0, [] {
    const KnotCurve c = load("unknot.json");
    double worst = 0;
    for (double z : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      const double exact = 2 * kPi / std::sqrt(1 + z * z);
      worst = std::max(worst, std::abs(potential(c, {0, 0, z}).phi - exact) / exact);
    }
    return Verdict{worst < 1e-8, fmt("max rel err %.2e (< 1e-8)", worst)};
  });

  criterion(2, "unknot report", 30.0, [&] {
    const ReportRun& r = runs["unknot"] = report_for("unknot.json");
    const auto& pts = r.document["critical_points"];
    bool ok = pts.size() == 1;
    double off = -1;
    if (ok) {
      const auto& x = pts[0]["x"];
      off = std::hypot(x[0].get<double>(), x[1].get<double>(), x[2].get<double>());
      ok = off < 1e-6 && pts[0]["index"] == 1;
    }
    const MorseReport& m = r.report;
    ok = ok && m.m == std::array<int, 4>{1, 1, 0, 0} && m.cp_found == 2 &&
         m.t_known == 0 && m.bound_ok == true && m.margin == 0;
    int far = 0;
    for (const FlowArc& a : r.tunneling.thetas) far += a.termination == Termination::kFarField;
    ok = ok && r.tunneling.gamma_count() == 0 && r.tunneling.theta_count() == 1 &&
         r.tunneling.thetas.size() == 2 && far == 2;
    return Verdict{ok, counts(m) + fmt(" |x|=%.1e", off) + " margin=" +
                           std::to_string(m.margin.value_or(-99)) +
                           " gamma=" + std::to_string(r.tunneling.gamma_count()) +
                           " theta=" + std::to_string(r.tunneling.theta_count()) +
                           " far_branches=" + std::to_string(far)};
  });

  auto torus_report = [&](const std::string& key, const std::string& file,
                          bool full) {
    const ReportRun& r = runs[key] = report_for(file);
    const MorseReport& m = r.report;
    const int finite = m.m[1] + m.m[2];
    bool ok = m.m[1] - m.m[2] == 1 && m.cp_found >= 4 && m.t_known == 1 &&
              m.bound_ok == true;
    std::string detail = counts(m) + " m1-m2=" + std::to_string(m.m[1] - m.m[2]);
    if (full) {
      int tube = 0, far = 0;
      for (const FlowArc& a : r.tunneling.gammas) tube += a.termination == Termination::kKnotTube;
      for (const FlowArc& a : r.tunneling.thetas) far += a.termination == Termination::kFarField;
      ok = ok && finite >= 3 &&
           tube == static_cast<int>(r.tunneling.gammas.size()) &&
           far == static_cast<int>(r.tunneling.thetas.size()) &&
           r.tunneling.gamma_count() == m.m[2] && r.tunneling.theta_count() == m.m[1] &&
           r.tunneling.gammas.size() == 2u * m.m[2] && r.tunneling.thetas.size() == 2u * m.m[1];
      detail += " gamma=" + std::to_string(r.tunneling.gamma_count()) + " (" +
                std::to_string(tube) + "/" + std::to_string(r.tunneling.gammas.size()) +
                " branches KnotTube) theta=" + std::to_string(r.tunneling.theta_count()) +
                " (" + std::to_string(far) + "/" + std::to_string(r.tunneling.thetas.size()) +
                " branches FarField)";
    }
    detail += " bound " + std::string(m.bound_ok == true ? "pass" : "fail") + " t=1";
    return Verdict{ok, detail};
  };

  criterion(3, "trefoil report", 15 * 60.0,
            [&] { return torus_report("trefoil", "trefoil.json", true); });
  criterion(4, "torus(3,4) report", 30 * 60.0,
            [&] { return torus_report("torus_3_4", "torus_3_4.json", false); });

  criterion(5, "harmonicity suite", 0, [] {
    const KnotCurve k = load("trefoil.json");
    double worst = 0;
    for (const Vec3& x : random_points(k, 100, 101))
      worst = std::max(worst, harmonicity_defect(hessian(k, x)));
    return Verdict{worst <= 1e-7, fmt("max |tr H|/|H|_F = %.2e over 100 points (<= 1e-7)", worst)};
  });

  criterion(6, "derivative consistency suite", 0, [] {
    double wg = 0, wh = 0;
    std::uint64_t seed = 200;
    for (const char* f : {"unknot.json", "trefoil.json", "torus_3_4.json"}) {
      const KnotCurve k = load(f);
      for (const Vec3& x : random_points(k, 100, seed++)) {
        const FieldSample s = field_sample(k, x);
        wg = std::max(wg, distance(s.grad, oracle::fd_gradient(k, x)) / norm(s.grad));
        wh = std::max(wh, (s.hess - oracle::fd_hessian(k, x)).frobenius() / s.hess.frobenius());
      }
    }
    return Verdict{wg < 1e-5 && wh < 1e-4,
                   fmt("grad rel err %.2e (< 1e-5), ", wg) +
                       fmt("hess rel err %.2e (< 1e-4), 3 knots x 100 points", wh)};
  });

  criterion(7, "far-field monopole", 0, [] {
    double worst = 0;
    for (const char* f : {"unknot.json", "trefoil.json"}) {
      const KnotCurve k = load(f);
      const double r = 1e4 * k.diameter();
      const Vec3 x = r * normalized(Vec3{0.3, -0.5, 0.8});
      worst = std::max(worst, std::abs(potential(k, x).phi * r / k.arc_length() - 1));
    }
    return Verdict{worst < 1e-3, fmt("max |phi |x| / L - 1| = %.2e (< 1e-3)", worst)};
  });

  criterion(8, "flow monotonicity", 0, [&] {
    double worst = 0;
    std::size_t arcs = 0;
    for (const auto& [name, r] : runs) {
      worst = std::max(worst, arc_violation(r));
      arcs += r.tunneling.gammas.size() + r.tunneling.thetas.size() +
              (r.census ? r.census->samples : 0);
    }
    const bool ok = runs.size() == 3 && worst <= 1e-9;
    return Verdict{ok, fmt("max per-step violation %.2e (<= 1e-9) over ", worst) +
                           std::to_string(arcs) + " arcs"};
  });

  criterion(9, "descending-flow census", 0, [&] {
    bool ok = runs.size() == 3;
    std::string detail;
    for (const auto& [name, r] : runs) {
      if (!r.census) {
        ok = false;
        continue;
      }
      const double frac = r.census->far_field_fraction();
      ok = ok && r.census->samples == 200 && frac >= 0.99;
      detail += name + " " + std::to_string(r.census->far_field) + "/" +
                std::to_string(r.census->samples) + " ";
    }
    return Verdict{ok, detail + "FarField (>= 99%)"};
  });

  criterion(10, "crossing diagnostic", 0, [] {
    const KnotCurve t = load("trefoil.json");
    const KnotCurve u = load("unknot.json");
    const int ct = crossing_upper_bound(t, default_projection_direction());
    const int cu = crossing_upper_bound(u, {0, 0, 1});
    const int tt = catalog_lookup(t.label()).value_or(-1);
    const bool ok = ct >= 3 && ct >= tt && tt == 1 && cu == 0;
    return Verdict{ok, "trefoil " + std::to_string(ct) + " (>= 3, >= t=" + std::to_string(tt) +
                           "), unknot planar " + std::to_string(cu)};
  });

  criterion(11, "determinism", 0, [] {
    const fs::path a = fs::temp_directory_path() / "knotmorse_accept_a";
    const fs::path b = fs::temp_directory_path() / "knotmorse_accept_b";
    fs::remove_all(a);
    fs::remove_all(b);
    std::string out_a, out_b;
    const std::string args = "report --knot " + knot_path("trefoil.json") + " --out ";
    const int ra = run_cli(args + a.string(), out_a);
    const int rb = run_cli(args + b.string(), out_b);
    fs::remove_all(a);
    fs::remove_all(b);
    const bool ok = ra == 0 && rb == 0 && !out_a.empty() && out_a == out_b;
    return Verdict{ok, "two trefoil report runs, " + std::to_string(out_a.size()) + " bytes, " +
                           (out_a == out_b ? "identical" : "DIFFERENT")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
