// One line per criterion. Default: exit 2 if any criterion fails.
// --report: exit 0 once every criterion was evaluated.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wtgfm/curtailment.hpp"
#include "wtgfm/gaindesign.hpp"
#include "wtgfm/output.hpp"
#include "wtgfm/parallel.hpp"
#include "wtgfm/scenario.hpp"
#include "wtgfm/smallsignal.hpp"

using namespace wtgfm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Config study(double v, Mode mode = Mode::GfmFr) {
  Config c = parse_config(nlohmann::json::object());
  c.scenario.v_w = c.plant.v_w = v;
  c.scenario.mode = mode;
  return c;
}

Outcome droop_formula() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double a = 100.0 * droop_coefficient(0.5, 15.1, 0.119, 0.0, 0.0);
  const double b = 100.0 * droop_coefficient(0.5, 6.6, 0.082, 0.02, 22.7);
  const double c = 100.0 * droop_coefficient(0.5, 1.0, 0.0, 0.083, 270.0);
  o.expect(std::abs(a - 27.7) <= 0.5, fmt("%.2f%%", a));
  o.expect(std::abs(b - 14.2) <= 0.5, fmt("%.2f%%", b));
  o.expect(std::abs(c - 2.3) <= 0.2, fmt("%.2f%%", c));
  const double t = seconds_since(t0);
  o.expect(t < 1.0, fmt("%.3g s", t));
  return o;
}

Outcome gain_rule() {
  Outcome o;
  const DesignSpec s = DesignSpec::table3();
  // tight MSC bound: omega_mpp = omega_del - K_msc dw / K_gsc
  const double w8 = 1.16 - 15.1 * s.d_omega_max / 0.5;
  const double w10 = 1.2 - 6.6 * s.d_omega_max / 0.5;
  auto within = [&](double got, double want, const char* name) {
    o.expect(std::abs(got - want) <= 0.01 * want, std::string(name) + fmt("=%.4g", got));
  };
  within(max_msc_gain(s, 0.5, 1.16, w8), 15.1, "K_msc(8)");
  within(max_msc_gain(s, 0.5, 1.2, w10), 6.6, "K_msc(10)");
  within(max_pitch_gain(s, 0.5, 6.6, 3.0), 22.7, "K_p(10)");
  within(max_pitch_gain(s, 0.5, 1.0, 5.4), 270.0, "K_p(12)");
  o.detail += fmt("; omega_mpp %.3f/%.3f", w8, w10);
  return o;
}

Outcome theorem_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto samples = stability_sweep(200, 2024);
  int admissible = 0, stable = 0, certified = 0;
  double worst_re = -1e300, worst_s = -1e300;
  for (const auto& s : samples) {
    admissible += theorem1_conditions(s.params) ? 1 : 0;
    stable += s.verdict.max_real < -1e-9 ? 1 : 0;
    certified += s.lasalle.max_eig_s <= 1e-9 ? 1 : 0;
    worst_re = std::max(worst_re, s.verdict.max_real);
    worst_s = std::max(worst_s, s.lasalle.max_eig_s);
  }
  const double t = seconds_since(t0);
  o.expect(admissible == 200, fmt("admissible %.0f/200", admissible));
  o.expect(stable == 200, fmt("stable %.0f/200 (worst Re %.3g)", stable, worst_re));
  o.expect(certified == 200, fmt("certified %.0f/200 (worst eig S %.3g)", certified, worst_s));
  o.expect(t < 30.0, fmt("%.3g s", t));
  return o;
}

Outcome jacobian_match() {
  Outcome o;
  for (double v : {8.0, 10.0, 12.0}) {
    const auto prep = prepare_run(study(v));
    ControlGains g = prep.loop.gains();
    g.gsc.t_dc = g.msc.t_dc = 0.0;
    const ReducedLoop loop(prep.loop.params(), g);
    const auto& k = prep.design.sens;
    const auto lp = LinearParams::from_plant(prep.loop.params(), g, k.k_omega_raw, k.k_beta);
    const double err = (loop.jacobian(loop.equilibrium()) - build_model(lp).system_matrix()).cwiseAbs().maxCoeff();
    o.expect(err <= 1e-8, fmt("%g m/s %.2g", v, err));
  }
  return o;
}

Outcome curtailment() {
  Outcome o;
  const TurbineParams p;
  const auto surf = default_surface(p);
  const std::vector<double> eta{0.8, 0.85, 0.9, 0.95, 1.0};
  const std::vector<double> wind{5.0, 6.5, 8.0, 9.5, 11.0, 12.5, 14.0};
  const auto table = build_table(p, surf, wind, eta);
  double worst = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < wind.size(); ++i) {
    for (std::size_t j = 0; j < eta.size(); ++j) {
      const auto& d = table.at(i, j);
      const double lam = d.omega_del_pu * p.omega_nom * p.rotor_radius / d.v_w;
      worst = std::max(worst, std::abs(cp(surf, lam, d.beta_del_deg) - d.target_cp));
      if (j > 0 && d.lambda_del > table.at(i, j - 1).lambda_del) monotone = false;
    }
  }
  double prev = 1e300;
  for (double e : eta) {
    const double l = solve_speed_deload(surf, e);
    worst = std::max(worst, std::abs(cp(surf, l, 0.0) - e * find_mpp(surf).cp));
    if (l > prev) monotone = false;
    prev = l;
  }
  o.expect(worst < 1e-9, fmt("max residual %.2g", worst));
  o.expect(monotone, "lambda_del non-increasing in eta");
  return o;
}

Outcome steady_state(std::vector<RunResult>& runs) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  runs = run_batch({study(8.0), study(10.0), study(12.0)});
  const double t = seconds_since(t0);
  for (const auto& r : runs) {
    for (const auto& c : steady_state_checks(r)) {
      o.expect(c.pass, fmt("%g m/s ", r.scenario.v_w) + c.name + fmt(" %.3g", c.value));
    }
  }
  o.expect(t < 60.0, fmt("%.3g s", t));
  return o;
}

Outcome ordering() {
  Outcome o;
  for (double v : {8.0, 10.0, 12.0}) {
    const auto rep = compare_modes(study(v));
    int failed = 0;
    for (const auto& c : rep.checks) {
      if (!c.pass) {
        o.expect(false, fmt("%g m/s ", v) + c.name + fmt(" %.3g", c.value));
        ++failed;
      }
    }
    if (failed == 0) o.expect(true, fmt("%g m/s all %.0f", v, static_cast<double>(rep.checks.size())));
    o.detail += fmt(" (nadir %.3f/%.3f/%.3f Hz)", rep.runs[0].metrics.nadir, rep.runs[1].metrics.nadir,
                    rep.runs[2].metrics.nadir);
  }
  return o;
}

Outcome droop_map_shape() {
  Outcome o;
  const TurbineParams p;
  std::vector<double> wind;
  for (int k = 5; k <= 14; ++k) wind.push_back(k);
  const std::vector<double> eta{0.8, 0.85, 0.9, 0.95, 1.0};
  const auto map = droop_map(p, default_surface(p), wind, eta, DesignSpec::fig7());
  bool in_wind = true, in_eta = true, flagged = true, filled = true;
  for (std::size_t i = 0; i < wind.size(); ++i) {
    flagged = flagged && map.at(i, eta.size() - 1).status == DroopStatus::NoDroop;
    for (std::size_t j = 0; j + 1 < eta.size(); ++j) {
      const auto& c = map.at(i, j);
      filled = filled && c.status == DroopStatus::Ok;
      if (i > 0 && c.m_p > map.at(i - 1, j).m_p) in_wind = false;
      if (j > 0 && map.at(i, j - 1).m_p > c.m_p) in_eta = false;
    }
  }
  o.expect(filled, "10x4 cells with droop");
  o.expect(in_wind, "non-increasing in v_w");
  o.expect(in_eta, "non-increasing as eta falls");
  o.expect(flagged, "eta=1 no_droop");
  return o;
}

Outcome numerics(const std::vector<RunResult>& runs) {
  Outcome o;
  for (double v : {8.0, 10.0, 12.0}) {
    auto prep = prepare_run(study(v));
    State x0 = find_equilibrium(prep.loop).x;
    x0[idx::omega_g] -= 0.005;
    x0[idx::v_dc] -= 0.01;
    const State a = integrate(prep.loop, x0, 0.0, 1.0, 2e-3);
    const State b = integrate(prep.loop, x0, 0.0, 1.0, 1e-3);
    const State c = integrate(prep.loop, x0, 0.0, 1.0, 5e-4);
    const double order = std::log2((a - b).norm() / (b - c).norm());
    o.expect(order >= 3.8, fmt("order(%g) %.2f", v, order));
  }
  double dc = 0.0;
  for (const auto& r : runs) dc = std::max(dc, r.max_dc_energy_residual);
  o.expect(!runs.empty() && dc < 1e-6, fmt("DC residual %.2g pu", dc));
  Config c = study(10.0);
  c.scenario.duration = 10.0;
  c.scenario.events = c.plant.network.events = {{5.0, 0.4}};
  std::ostringstream x, y;
  write_trace_csv(x, run_scenario(c).trace);
  write_trace_csv(y, run_scenario(c).trace);
  o.expect(x.str() == y.str(), fmt("CSV identical (%.0f bytes)", static_cast<double>(x.str().size())));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const bool report = argc > 1 && std::strcmp(argv[1], "--report") == 0;
  std::vector<RunResult> runs;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"droop formula", droop_formula},
      {"gain design rule", gain_rule},
      {"stability property suite", theorem_suite},
      {"linearization consistency", jacobian_match},
      {"curtailment solvers", curtailment},
      {"closed-loop steady state", [&] { return steady_state(runs); }},
      {"mode comparison ordering", ordering},
      {"droop map shape", droop_map_shape},
      {"numerics", [&] { return numerics(runs); }},
  };
  int passed = 0, errors = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
      ++errors;
    }
    passed += o.pass ? 1 : 0;
    std::printf("criterion %zu %-26s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", passed, criteria.size());
  if (errors > 0) return 1;
  if (report) return 0;
  return passed == static_cast<int>(criteria.size()) ? 0 : 2;
}
