#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "wtgfm/errors.hpp"
#include "wtgfm/metrics.hpp"
#include "wtgfm/output.hpp"
#include "wtgfm/scenario.hpp"

using namespace wtgfm;
using nlohmann::json;

namespace {

// 50 Hz, ramp down at 0.1 Hz/s from t = 5 to the nadir, linear recovery, flat tail
SimTrace synthetic_trace() {
  SimTrace tr;
  for (int k = 0; k <= 2000; ++k) {
    const double t = k * 0.01;
    double f = 50.0;
    if (t >= 5.0 && t < 8.56) f = 50.0 - 0.1 * (t - 5.0);
    else if (t >= 8.56 && t < 12.0) f = 49.644 + 0.08 * (t - 8.56) / 3.44;
    else if (t >= 12.0) f = 49.724;
    tr.t.push_back(t);
    tr.f_g.push_back(f);
    tr.f_gsc.push_back(f);
    tr.v_dc.push_back(t < 5.0 ? 1.0 : 0.99);
    tr.omega_r.push_back(1.0);
    tr.beta.push_back(0.0);
    tr.p_wt.push_back(t < 5.0 ? 0.8 : 0.9);
    tr.p_gsc.push_back(0.8);
    tr.p_g.push_back(1.2);
  }
  return tr;
}

Config config_at(double v, Mode mode, double duration, std::vector<LoadEvent> events) {
  json doc = json::object();
  doc["scenario"] = {{"v_w", v}, {"mode", to_string(mode)}, {"duration", duration}, {"events", json::array()}};
  for (const auto& e : events) doc["scenario"]["events"].push_back({{"time", e.time}, {"delta_p", e.delta_p}});
  return parse_config(doc);
}

std::string csv_of(const SimTrace& tr) {
  std::ostringstream os;
  write_trace_csv(os, tr);
  return os.str();
}

}  // namespace

TEST(Metrics, SyntheticTrace) {
  const auto m = compute_metrics(synthetic_trace(), 5.0);
  EXPECT_NEAR(m.f_pre, 50.0, 1e-12);
  EXPECT_NEAR(m.nadir, 49.644, 1e-9);
  EXPECT_NEAR(m.t_nadir, 8.56, 1e-9);
  EXPECT_NEAR(m.rocof_max, 0.1, 1e-9);
  EXPECT_NEAR(m.f_ss, 49.724, 1e-9);
  EXPECT_NEAR(m.dv_dc_ss, -0.01, 1e-12);
  EXPECT_NEAR(m.dp_wt_ss, 0.1, 1e-12);
  EXPECT_NEAR(m.domega_g_ss, -0.276 / 50.0, 1e-11);
  EXPECT_NEAR(m.droop, 0.276 / 50.0 / 0.1, 1e-9);
  EXPECT_NEAR(m.stiffness * m.droop, 1.0, 1e-12);
}

TEST(Metrics, ShortTraceRejected) {
  SimTrace tr = synthetic_trace();
  EXPECT_THROW(compute_metrics(tr, 19.0), DomainError);
  EXPECT_THROW(compute_metrics(tr, 25.0), DomainError);
  SimTrace tiny;
  tiny.t = {0.0, 1.0};
  tiny.f_g = {50.0, 50.0};
  EXPECT_THROW(compute_metrics(tiny, 0.5), DomainError);
}

TEST(Metrics, ValidityFlags) {
  SimTrace tr = synthetic_trace();
  EXPECT_TRUE(tr.valid());
  tr.f_g[10] = std::nan("");
  EXPECT_FALSE(tr.valid());
  tr = synthetic_trace();
  tr.t[5] += 0.003;
  EXPECT_FALSE(tr.valid());
}

TEST(Config, DefaultsAndUnknownKey) {
  const Config c = parse_config(json::object());
  EXPECT_EQ(c.scenario.v_w, 8.0);
  EXPECT_EQ(c.scenario.mode, Mode::GfmFr);
  EXPECT_TRUE(c.pinned.empty());
  EXPECT_THROW(parse_config(json{{"scenario", {{"bogus", 1}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"turbines", json::object()}}), ConfigError);
}

TEST(Config, Overrides) {
  json doc = json::object();
  apply_override(doc, "scenario.v_w=10");
  apply_override(doc, "scenario.mode=GFL_MPPT");
  apply_override(doc, "control.design.preset=\"fig7\"");
  const Config c = parse_config(doc);
  EXPECT_EQ(c.scenario.v_w, 10.0);
  EXPECT_EQ(c.plant.v_w, 10.0);
  EXPECT_EQ(c.scenario.mode, Mode::GflMppt);
  EXPECT_EQ(c.design.d_omega_max, 0.005);
  EXPECT_THROW(apply_override(doc, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(doc, "=3"), ConfigError);
}

TEST(Config, PinnedGainSurvivesDesign) {
  json doc = json::object();
  apply_override(doc, "control.msc.k_theta=3");
  const Config c = parse_config(doc);
  EXPECT_EQ(c.pinned.count("msc.k_theta"), 1u);
  const auto prep = prepare_run(c);
  EXPECT_EQ(prep.loop.gains().msc.k_theta, 3.0);
  EXPECT_NE(prep.design.gains.msc.k_theta, 3.0);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(parse_config(json{{"scenario", {{"eta", 1.2}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"scenario", {{"mode", "GFM"}}}}), ConfigError);
  EXPECT_THROW(parse_config(json{{"scenario", {{"v_w", "fast"}}}}), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(Scenario, Validate) {
  Scenario s;
  EXPECT_NO_THROW(s.validate());
  s.duration = 31.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.events = {{30.0003, 0.4}};
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.output_dt = 7e-4;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.events = {{0.0, 0.4}};
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Run, NoEventStaysPut) {
  const auto r = run_scenario(config_at(10.0, Mode::GfmFr, 5.0, {}));
  ASSERT_TRUE(r.trace.valid());
  EXPECT_EQ(r.trace.size(), 5001u);
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    ASSERT_NEAR(r.trace.f_g[k], r.trace.f_g[0], 1e-6);
    ASSERT_NEAR(r.trace.v_dc[k], 1.0, 1e-6);
  }
}

TEST(Run, GflHoldsDcAndTurbinePower) {
  const auto r = run_scenario(config_at(8.0, Mode::GflMppt, 6.0, {{2.0, 0.4}}));
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    ASSERT_EQ(r.trace.v_dc[k], 1.0);
    ASSERT_EQ(r.trace.p_wt[k], r.trace.p_wt[0]);
  }
  EXPECT_LT(r.trace.f_g.back(), r.trace.f_g.front());
}

TEST(Run, FrequencyResponseDrawsOnRotor) {
  const auto r = run_scenario(config_at(8.0, Mode::GfmFr, 12.0, {{2.0, 0.4}}));
  const auto m = compute_metrics(r.trace, 2.0);
  EXPECT_LT(r.trace.omega_r.back(), r.trace.omega_r.front());
  EXPECT_GT(m.dp_wt_ss, 0.0);
  EXPECT_LT(m.dv_dc_ss, 0.0);
  EXPECT_LT(m.nadir, m.f_pre);
  EXPECT_LT(r.max_dc_energy_residual, 1e-6);
}

TEST(Output, CsvRoundTripBitExact) {
  const auto r = run_scenario(config_at(8.0, Mode::GfmFr, 4.0, {{1.0, 0.4}}));
  std::istringstream in(csv_of(r.trace));
  const SimTrace back = read_trace_csv(in);
  ASSERT_EQ(back.size(), r.trace.size());
  EXPECT_EQ(back.t, r.trace.t);
  EXPECT_EQ(back.f_g, r.trace.f_g);
  EXPECT_EQ(back.v_dc, r.trace.v_dc);
  EXPECT_EQ(back.beta, r.trace.beta);
  EXPECT_EQ(back.p_g, r.trace.p_g);
  std::istringstream bad("t,f\n0,1\n");
  EXPECT_THROW(read_trace_csv(bad), DomainError);
}

TEST(Output, RepeatedRunsByteIdentical) {
  const Config c = config_at(10.0, Mode::GfmFr, 4.0, {{1.0, 0.4}});
  EXPECT_EQ(csv_of(run_scenario(c).trace), csv_of(run_scenario(c).trace));
}

TEST(Output, RunJsonFields) {
  const auto r = run_scenario(config_at(8.0, Mode::GfmFr, 4.0, {{1.0, 0.4}}));
  const auto m = compute_metrics(r.trace, 1.0);
  const json j = run_json(r, &m);
  EXPECT_EQ(j.at("mode"), "GFM_FR");
  EXPECT_EQ(j.at("samples"), r.trace.size());
  for (const char* k : {"nadir_hz", "rocof_max_hz_per_s", "f_ss_hz", "droop_pu", "dv_dc_ss_pu"})
    EXPECT_TRUE(j.at("metrics").contains(k)) << k;
  EXPECT_EQ(j.at("metrics").at("nadir_hz").get<double>(), m.nadir);
  EXPECT_TRUE(j.at("design").at("ratio_condition").get<bool>());
}

TEST(Checks, SteadyStateAtEightMetres) {
  const auto r = run_scenario(config_at(8.0, Mode::GfmFr, 40.0, {{5.0, 0.4}}));
  const auto checks = steady_state_checks(r);
  ASSERT_FALSE(checks.empty());
  for (const auto& c : checks) {
    if (c.name == "droop_vs_design") continue;  // large-step droop differs, see README
    EXPECT_TRUE(c.pass) << c.name << " " << c.value << " " << c.limit;
  }
}

TEST(Compare, EightMetresOrdering) {
  Config c = config_at(8.0, Mode::GfmFr, 40.0, {{10.0, 0.4}});
  const auto rep = compare_modes(c);
  EXPECT_EQ(rep.runs[0].mode, Mode::GflMppt);
  EXPECT_EQ(rep.runs[2].mode, Mode::GfmFr);
  for (const auto& chk : rep.checks) EXPECT_TRUE(chk.pass) << chk.name;
  EXPECT_TRUE(rep.all_pass());
  EXPECT_GT(rep.runs[2].metrics.nadir, rep.runs[1].metrics.nadir);
}
