// wtgfm: case studies for dual-port grid-forming wind turbines.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wtgfm/curtailment.hpp"
#include "wtgfm/errors.hpp"
#include "wtgfm/gaindesign.hpp"
#include "wtgfm/output.hpp"
#include "wtgfm/scenario.hpp"
#include "wtgfm/smallsignal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wtgfm;

namespace {

constexpr int kOk = 0;
constexpr int kAssertFail = 2;
constexpr int kConfigError = 3;

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out = ".";
  bool plot = false;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config, "scenario JSON (defaults when omitted)");
  sub->add_option("--set", c.sets, "override, e.g. scenario.v_w=10")->allow_extra_args(false);
  sub->add_option("-o,--out", c.out, "output directory");
  sub->add_flag("--plot", c.plot, "also write an SVG");
  sub->add_flag("-q,--quiet", c.quiet, "no summary on stdout");
}

Config config_of(const Common& c) { return load_config(c.config, c.sets); }

std::string csv_of(const SimTrace& tr) {
  std::ostringstream ss;
  write_trace_csv(ss, tr);
  return ss.str();
}

void print_checks(const std::vector<CheckResult>& checks) {
  for (const auto& k : checks) {
    std::printf("  %-28s %-4s %.6g", k.name.c_str(), k.pass ? "ok" : "FAIL", k.value);
    if (k.limit > 0.0) std::printf(" (< %g)", k.limit);
    std::printf("\n");
  }
}

bool all_pass(const std::vector<CheckResult>& checks) {
  for (const auto& k : checks) {
    if (!k.pass) return false;
  }
  return true;
}

std::vector<double> parse_grid(const std::string& text) {
  // "a:b:step" or comma list
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, s = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3 || s <= 0 || b < a)
      throw ConfigError("bad grid '" + text + "', expected start:stop:step");
    const int n = static_cast<int>(std::floor((b - a) / s + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(a + k * s);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad grid entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty grid");
  return out;
}

int cmd_simulate(const Common& c) {
  const Config cfg = config_of(c);
  const RunResult run = run_scenario(cfg);
  const bool has_event = !cfg.scenario.events.empty();
  FrequencyMetrics m;
  if (has_event) m = compute_metrics(run.trace, cfg.scenario.first_event_time(), cfg.plant.network.f_base);
  const auto checks = steady_state_checks(run, cfg.plant.network.f_base);

  json report = run_json(run, has_event ? &m : nullptr);
  report["checks"] = checks_json(checks);
  const fs::path dir(c.out);
  write_file(dir / "trace.csv", csv_of(run.trace));
  write_file(dir / "metrics.json", report.dump(2) + "\n");
  if (c.plot) {
    std::ostringstream svg;
    write_trace_svg(svg, {{to_string(cfg.scenario.mode), &run.trace}},
                    to_string(cfg.scenario.mode) + ", v_w = " + std::to_string(cfg.scenario.v_w).substr(0, 5) + " m/s");
    write_file(dir / "trace.svg", svg.str());
  }
  if (!c.quiet) {
    std::printf("%s v_w=%g eta=%g: %zu samples\n", to_string(cfg.scenario.mode).c_str(), cfg.scenario.v_w,
                cfg.scenario.eta, run.trace.size());
    if (has_event)
      std::printf("  nadir %.4f Hz at %.3f s, rocof %.4f Hz/s, f_ss %.4f Hz, droop %.5g\n", m.nadir, m.t_nadir,
                  m.rocof_max, m.f_ss, m.droop);
    print_checks(checks);
  }
  return all_pass(checks) ? kOk : kAssertFail;
}

int cmd_compare(const Common& c) {
  const Config cfg = config_of(c);
  const CompareReport rep = compare_modes(cfg);
  const fs::path dir(c.out);
  for (const auto& r : rep.runs) write_file(dir / ("trace_" + to_string(r.mode) + ".csv"), csv_of(r.run.trace));
  write_file(dir / "compare.json", compare_json(rep).dump(2) + "\n");
  if (c.plot) {
    std::vector<std::pair<std::string, const SimTrace*>> series;
    for (const auto& r : rep.runs) series.emplace_back(to_string(r.mode), &r.run.trace);
    std::ostringstream svg;
    write_trace_svg(svg, series, "v_w = " + std::to_string(cfg.scenario.v_w).substr(0, 5) + " m/s");
    write_file(dir / "compare.svg", svg.str());
  }
  if (!c.quiet) {
    std::printf("%-9s %10s %10s %10s %10s\n", "mode", "nadir", "rocof", "f_ss", "droop");
    for (const auto& r : rep.runs)
      std::printf("%-9s %10.4f %10.4f %10.4f %10.5g\n", to_string(r.mode).c_str(), r.metrics.nadir,
                  r.metrics.rocof_max, r.metrics.f_ss, r.metrics.droop);
    print_checks(rep.checks);
  }
  return rep.all_pass() ? kOk : kAssertFail;
}

int cmd_deload(const Common& c, const std::string& wind, const std::string& eta) {
  const Config cfg = config_of(c);
  const auto v_grid = wind.empty() ? default_wind_grid() : parse_grid(wind);
  const auto e_grid = eta.empty() ? default_eta_grid() : parse_grid(eta);
  const DeloadTable table = build_table(cfg.plant.turbine, cfg.plant.surface, v_grid, e_grid);
  std::ostringstream ss;
  write_deload_csv(ss, table);
  write_file(fs::path(c.out) / "deload_table.csv", ss.str());
  if (!c.quiet) std::printf("deload table: %zu x %zu cells\n", v_grid.size(), e_grid.size());
  return kOk;
}

int cmd_gain_design(const Common& c) {
  const Config cfg = config_of(c);
  const GainDesign d = design_gains(cfg.plant.turbine, cfg.plant.surface, cfg.scenario.v_w, cfg.scenario.eta,
                                    cfg.design, cfg.gains);
  const json j = design_json(d);
  write_file(fs::path(c.out) / "gain_design.json", j.dump(2) + "\n");
  if (!c.quiet) {
    std::printf("v_w=%g eta=%g omega_del=%.4f beta_del=%.3f\n", d.point.v_w, d.point.eta, d.point.omega_del_pu,
                d.point.beta_del_deg);
    std::printf("  K_omega=%.4f K_beta=%.4f\n", d.sens.k_omega, d.sens.k_beta);
    std::printf("  K_theta gsc=%.4g msc=%.4g%s K_p=%.4g\n", d.gains.gsc.k_theta, d.gains.msc.k_theta,
                d.floor_applied ? " (floor)" : "", d.gains.pitch.k_p);
    if (d.has_droop)
      std::printf("  m_p=%.4f\n", d.m_p);
    else
      std::printf("  no droop\n");
  }
  return d.target_met ? kOk : kAssertFail;
}

int cmd_droop_map(const Common& c, const std::string& wind, const std::string& eta) {
  const Config cfg = config_of(c);
  const auto v_grid = wind.empty() ? parse_grid("5:14:1") : parse_grid(wind);
  const auto e_grid = eta.empty() ? parse_grid("0.8,0.85,0.9,0.95,1.0") : parse_grid(eta);
  const DroopMap map = droop_map(cfg.plant.turbine, cfg.plant.surface, v_grid, e_grid, cfg.design);
  std::ostringstream ss;
  write_droop_csv(ss, map);
  const fs::path dir(c.out);
  write_file(dir / "droop_map.csv", ss.str());
  if (c.plot) {
    std::ostringstream svg;
    write_droop_svg(svg, map);
    write_file(dir / "droop_map.svg", svg.str());
  }
  bool missed = false;
  for (const auto& cell : map.cells) missed = missed || cell.status == DroopStatus::TargetMissed;
  if (!c.quiet) {
    std::printf("%6s", "v_w");
    for (double e : e_grid) std::printf(" %9.2f", e);
    std::printf("\n");
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
      std::printf("%6.2f", v_grid[i]);
      for (std::size_t j = 0; j < e_grid.size(); ++j) {
        const auto& cell = map.at(i, j);
        if (std::isnan(cell.m_p))
          std::printf(" %9s", to_string(cell.status).c_str());
        else
          std::printf(" %9.4f", cell.m_p);
      }
      std::printf("\n");
    }
  }
  return missed ? kAssertFail : kOk;
}

int cmd_smallsignal(const Common& c) {
  const Config cfg = config_of(c);
  const PreparedRun prep = prepare_run(cfg);
  const auto& d = prep.design;
  const LinearParams lp =
      LinearParams::from_plant(prep.loop.params(), prep.loop.gains(), d.sens.k_omega, d.sens.k_beta);
  const SmallSignalModel model = build_model(lp);
  const StabilityVerdict verdict = stability_verdict(model);
  const bool cond = theorem1_conditions(lp);
  LaSalleReport las;
  if (cond) las = lasalle_verify(model);
  json j = model_json(model, verdict, cond ? &las : nullptr);
  j["theorem1_conditions"] = cond;
  write_file(fs::path(c.out) / "smallsignal.json", j.dump(2) + "\n");
  if (!c.quiet) {
    std::printf("%s v_w=%g: max Re = %.6g (%s)\n", to_string(cfg.scenario.mode).c_str(), cfg.scenario.v_w,
                verdict.max_real, verdict.stable ? "stable" : "unstable");
    for (Eigen::Index k = 0; k < verdict.spectrum.size(); ++k)
      std::printf("  %12.6g %+12.6gi\n", verdict.spectrum[k].real(), verdict.spectrum[k].imag());
    if (cond)
      std::printf("  certificate: min eig M %.3g, max eig S %.3g%s\n", las.min_eig_m, las.max_eig_s,
                  las.passed ? "" : " FAIL");
    else
      std::printf("  theorem conditions not met\n");
  }
  return verdict.stable && (!cond || las.passed) ? kOk : kAssertFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtgfm: dual-port grid-forming wind turbine studies"};
  app.require_subcommand(1);
  Common common;
  std::string wind, eta;

  auto* sim = app.add_subcommand("simulate", "one scenario run: trace.csv, metrics.json");
  add_common(sim, common);
  auto* cmp = app.add_subcommand("compare", "GFL_MPPT, GFM_MPPT and GFM_FR on identical events");
  add_common(cmp, common);
  auto* del = app.add_subcommand("deload-table", "curtailed operating points over (v_w, eta)");
  add_common(del, common);
  del->add_option("--wind", wind, "wind grid, start:stop:step or list");
  del->add_option("--eta", eta, "eta grid, start:stop:step or list");
  auto* gd = app.add_subcommand("gain-design", "gains and droop at scenario.v_w / scenario.eta");
  add_common(gd, common);
  auto* dm = app.add_subcommand("droop-map", "m_p over (v_w, eta)");
  add_common(dm, common);
  dm->add_option("--wind", wind, "wind grid, start:stop:step or list");
  dm->add_option("--eta", eta, "eta grid, start:stop:step or list");
  auto* ss = app.add_subcommand("smallsignal", "linear model, spectrum and Lyapunov certificate");
  add_common(ss, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*sim) return cmd_simulate(common);
    if (*cmp) return cmd_compare(common);
    if (*del) return cmd_deload(common, wind, eta);
    if (*gd) return cmd_gain_design(common);
    if (*dm) return cmd_droop_map(common, wind, eta);
    if (*ss) return cmd_smallsignal(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
