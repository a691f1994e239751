#pragma once

#include <array>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtgfm/gaindesign.hpp"
#include "wtgfm/metrics.hpp"
#include "wtgfm/plant.hpp"

namespace wtgfm {

struct Scenario {
  Mode mode = Mode::GfmFr;
  double v_w = 8.0;             // m/s
  double eta = 0.9;
  double base_load = 2.0;       // pu (100 MW on 50 MVA)
  std::vector<LoadEvent> events{{30.0, 0.4}};
  double duration = 60.0;       // s
  double dt = 5e-4;             // s
  double output_dt = 1e-3;      // s

  /// dt divides event times and output_dt; duration leaves 2 s after the
  /// last event.
  void validate() const;
  double first_event_time() const;
};

/// Everything one run needs. Gains listed in `pinned` (e.g. "msc.k_theta")
/// were set explicitly and survive the automatic gain design.
struct Config {
  PlantParams plant;
  ControlGains gains;
  DesignSpec design;
  Scenario scenario;
  std::set<std::string> pinned;
};

/// Defaults of the study system as JSON (keys turbine, sg, network, control, scenario).
nlohmann::json default_config_json();

/// Applies `a.b.c=value` to a JSON document; the value is parsed as JSON
/// when possible, otherwise taken as a string. ConfigError on bad syntax.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Merges over the defaults and validates; unknown keys are ConfigError.
Config parse_config(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});
nlohmann::json to_json(const Config& config);

/// Gains and plant for the configured mode; GFL and GFM_MPPT use the
/// eta = 1 operating point.
struct PreparedRun {
  GainDesign design;
  ClosedLoop loop;
};

PreparedRun prepare_run(const Config& config);

struct RunResult {
  Scenario scenario;
  GainDesign design;
  ControlGains gains;  // as simulated, after pinned overrides
  double wt_scale = 1.0;
  SimTrace trace;
  EquilibriumReport equilibrium;
  double max_dc_energy_residual = 0.0;  // pu, at step midpoints
};

/// Equilibrium start, RK4 with loads held per step, output every output_dt.
RunResult run_scenario(const Config& config);

/// Runs the loop from x0 and returns the final state; no output.
State integrate(const ClosedLoop& loop, State x0, double t0, double t1, double dt);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

/// Post-run checks: DC/frequency proportionality, synchronization,
/// MPPT inertia-only response and measured droop vs the design.
std::vector<CheckResult> steady_state_checks(const RunResult& run, double f_base = 50.0);

struct ModeRun {
  Mode mode = Mode::GflMppt;
  RunResult run;
  FrequencyMetrics metrics;
};

struct CompareReport {
  std::array<ModeRun, 3> runs;  // GFL_MPPT, GFM_MPPT, GFM_FR
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

/// Three modes on identical events, in parallel.
CompareReport compare_modes(const Config& base);

}  // namespace wtgfm
