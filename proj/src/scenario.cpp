#include "wtgfm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "wtgfm/errors.hpp"
#include "wtgfm/parallel.hpp"

namespace wtgfm {

using nlohmann::json;

namespace {

bool divides(double step, double span) {
  const double q = span / step;
  return std::abs(q - std::round(q)) < 1e-6;
}

// Recursively overlays `user` onto `base`; every user key must exist in base.
void merge_strict(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("expected an object at '" + path + "'");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object()) {
      merge_strict(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

double num(const json& j, const char* key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError("'" + where + "." + key + "' must be a number");
  return v.get<double>();
}

ConverterGains converter_from(const json& j, const std::string& where) {
  ConverterGains g;
  g.k_theta = num(j, "k_theta", where);
  g.k_d = num(j, "k_d", where);
  g.t_dc = num(j, "t_dc", where);
  g.k_q = num(j, "k_q", where);
  g.t_v = num(j, "t_v", where);
  g.v_star = num(j, "v_star", where);
  g.q_star = num(j, "q_star", where);
  return g;
}

json converter_to(const ConverterGains& g) {
  return {{"k_theta", g.k_theta}, {"k_d", g.k_d}, {"t_dc", g.t_dc}, {"k_q", g.k_q},
          {"t_v", g.t_v},         {"v_star", g.v_star}, {"q_star", g.q_star}};
}

bool has_path(const json& doc, const std::vector<std::string>& path) {
  const json* cur = &doc;
  for (const auto& p : path) {
    if (!cur->is_object() || !cur->contains(p)) return false;
    cur = &(*cur)[p];
  }
  return !cur->is_null();
}

}  // namespace

void Scenario::validate() const {
  if (!(v_w > 0.0)) throw ConfigError("scenario.v_w must be > 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("scenario.eta must lie in (0, 1]");
  if (!(dt > 0.0 && output_dt > 0.0 && duration > 0.0)) throw ConfigError("scenario times must be > 0");
  if (!divides(dt, output_dt)) throw ConfigError("scenario.dt must divide scenario.output_dt");
  if (!divides(dt, duration)) throw ConfigError("scenario.dt must divide scenario.duration");
  for (const auto& e : events) {
    if (!(e.time > 0.0)) throw ConfigError("load events must occur after t = 0");
    if (!divides(dt, e.time)) throw ConfigError("scenario.dt must divide every event time");
    if (!(duration >= e.time + 2.0)) throw ConfigError("scenario.duration must extend 2 s past the last event");
  }
}

double Scenario::first_event_time() const {
  double t = duration;
  for (const auto& e : events) t = std::min(t, e.time);
  return t;
}

json default_config_json() {
  const TurbineParams tp;
  const SgParams sg;
  const NetworkParams net;
  const ControlGains g;
  const DesignSpec spec;
  const Scenario sc;
  json events = json::array();
  for (const auto& e : sc.events) events.push_back({{"time", e.time}, {"delta_p", e.delta_p}});
  return {
      {"turbine",
       {{"air_density", tp.air_density},
        {"rotor_radius", tp.rotor_radius},
        {"inertia", tp.inertia},
        {"omega_nom", tp.omega_nom},
        {"omega_max_pu", tp.omega_max_pu},
        {"rated_power", tp.rated_power},
        {"rated_wind", tp.rated_wind},
        {"n_agg", tp.n_agg},
        {"v_cut_in", tp.v_cut_in},
        {"v_cut_out", tp.v_cut_out},
        {"cp_model", "calibrated"},
        {"cp_table", nullptr}}},
      {"sg", {{"inertia_h", sg.inertia_h}, {"rating", sg.rating}, {"t_g", sg.t_g}, {"k_g", sg.k_g}}},
      {"network",
       {{"b_g", net.b_g},
        {"b_msc", net.b_msc},
        {"s_base", net.s_base},
        {"v_dc_base", net.v_dc_base},
        {"dc_capacitance", net.dc_capacitance},
        {"f_base", net.f_base},
        {"f_machine_base", net.f_machine_base}}},
      {"control",
       {{"gsc", converter_to(g.gsc)},
        {"msc", converter_to(g.msc)},
        {"v_dc_star", g.v_dc_star},
        {"omega_0", g.omega_0},
        {"omega_del", nullptr},
        {"pitch",
         {{"k_p", g.pitch.k_p},
          {"beta_del_deg", nullptr},
          {"kp_speed", g.pitch.kp_speed},
          {"ki_speed", g.pitch.ki_speed},
          {"kp_power", g.pitch.kp_power},
          {"ki_power", g.pitch.ki_power},
          {"p_max_msc", g.pitch.p_max_msc},
          {"t_servo", g.pitch.t_servo},
          {"rate_limit", g.pitch.rate_limit},
          {"beta_min", g.pitch.beta_min},
          {"beta_max", g.pitch.beta_max}}},
        {"design",
         {{"preset", "table3"},
          {"d_omega_max", nullptr},
          {"d_vdc_max", nullptr},
          {"k_theta_msc_floor", spec.k_theta_msc_floor},
          {"target_mp", nullptr}}}}},
      {"scenario",
       {{"mode", to_string(sc.mode)},
        {"v_w", sc.v_w},
        {"eta", sc.eta},
        {"base_load", sc.base_load},
        {"events", events},
        {"duration", sc.duration},
        {"dt", sc.dt},
        {"output_dt", sc.output_dt}}}};
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* cur = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("empty path component in override: " + assignment);
    parts.push_back(part);
  }
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    if (!cur->is_object()) throw ConfigError("override path crosses a non-object: " + key);
    cur = &(*cur)[parts[k]];
    if (cur->is_null()) *cur = json::object();
  }
  if (!cur->is_object()) throw ConfigError("override path crosses a non-object: " + key);
  (*cur)[parts.back()] = value;
}

Config parse_config(const json& user) {
  json doc = default_config_json();
  try {
    merge_strict(doc, user, "");
    Config c;
    const auto& t = doc.at("turbine");
    auto& tp = c.plant.turbine;
    tp.air_density = num(t, "air_density", "turbine");
    tp.rotor_radius = num(t, "rotor_radius", "turbine");
    tp.inertia = num(t, "inertia", "turbine");
    tp.omega_nom = num(t, "omega_nom", "turbine");
    tp.omega_max_pu = num(t, "omega_max_pu", "turbine");
    tp.rated_power = num(t, "rated_power", "turbine");
    tp.rated_wind = num(t, "rated_wind", "turbine");
    tp.n_agg = num(t, "n_agg", "turbine");
    tp.v_cut_in = num(t, "v_cut_in", "turbine");
    tp.v_cut_out = num(t, "v_cut_out", "turbine");
    try {
      tp.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (!t.at("cp_table").is_null()) {
      c.plant.surface = read_cp_table(std::filesystem::path(t.at("cp_table").get<std::string>()));
    } else {
      const auto model = t.at("cp_model").get<std::string>();
      if (model == "calibrated") {
        c.plant.surface = default_surface(tp);
      } else if (model == "standard") {
        c.plant.surface = CpSurface::standard();
      } else {
        throw ConfigError("turbine.cp_model must be 'calibrated' or 'standard'");
      }
    }

    const auto& s = doc.at("sg");
    c.plant.sg.inertia_h = num(s, "inertia_h", "sg");
    c.plant.sg.rating = num(s, "rating", "sg");
    c.plant.sg.t_g = num(s, "t_g", "sg");
    c.plant.sg.k_g = num(s, "k_g", "sg");

    const auto& n = doc.at("network");
    auto& net = c.plant.network;
    net.b_g = num(n, "b_g", "network");
    net.b_msc = num(n, "b_msc", "network");
    net.s_base = num(n, "s_base", "network");
    net.v_dc_base = num(n, "v_dc_base", "network");
    net.dc_capacitance = num(n, "dc_capacitance", "network");
    net.f_base = num(n, "f_base", "network");
    net.f_machine_base = num(n, "f_machine_base", "network");

    const auto& ctl = doc.at("control");
    auto& g = c.gains;
    g.gsc = converter_from(ctl.at("gsc"), "control.gsc");
    g.msc = converter_from(ctl.at("msc"), "control.msc");
    g.v_dc_star = num(ctl, "v_dc_star", "control");
    g.omega_0 = num(ctl, "omega_0", "control");
    if (!ctl.at("omega_del").is_null()) g.omega_del = num(ctl, "omega_del", "control");
    const auto& p = ctl.at("pitch");
    g.pitch.k_p = num(p, "k_p", "control.pitch");
    if (!p.at("beta_del_deg").is_null()) g.pitch.beta_del_deg = num(p, "beta_del_deg", "control.pitch");
    g.pitch.kp_speed = num(p, "kp_speed", "control.pitch");
    g.pitch.ki_speed = num(p, "ki_speed", "control.pitch");
    g.pitch.kp_power = num(p, "kp_power", "control.pitch");
    g.pitch.ki_power = num(p, "ki_power", "control.pitch");
    g.pitch.p_max_msc = num(p, "p_max_msc", "control.pitch");
    g.pitch.t_servo = num(p, "t_servo", "control.pitch");
    g.pitch.rate_limit = num(p, "rate_limit", "control.pitch");
    g.pitch.beta_min = num(p, "beta_min", "control.pitch");
    g.pitch.beta_max = num(p, "beta_max", "control.pitch");
    g.pitch.omega_max_pu = tp.omega_max_pu;

    const auto& d = ctl.at("design");
    c.design = DesignSpec::preset(d.at("preset").get<std::string>());
    if (!d.at("d_omega_max").is_null()) c.design.d_omega_max = num(d, "d_omega_max", "control.design");
    if (!d.at("d_vdc_max").is_null()) c.design.d_vdc_max = num(d, "d_vdc_max", "control.design");
    c.design.k_theta_msc_floor = num(d, "k_theta_msc_floor", "control.design");
    if (!d.at("target_mp").is_null()) c.design.target_mp = num(d, "target_mp", "control.design");
    c.design.validate();

    // gains the user set explicitly are kept over the designed ones
    const std::vector<std::pair<std::string, std::vector<std::string>>> designable{
        {"gsc.k_theta", {"control", "gsc", "k_theta"}}, {"msc.k_theta", {"control", "msc", "k_theta"}},
        {"msc.k_d", {"control", "msc", "k_d"}},         {"pitch.k_p", {"control", "pitch", "k_p"}},
        {"omega_del", {"control", "omega_del"}},        {"pitch.beta_del_deg", {"control", "pitch", "beta_del_deg"}}};
    for (const auto& [name, path] : designable) {
      if (has_path(user, path)) c.pinned.insert(name);
    }

    const auto& sc = doc.at("scenario");
    c.scenario.mode = parse_mode(sc.at("mode").get<std::string>());
    c.scenario.v_w = num(sc, "v_w", "scenario");
    c.scenario.eta = num(sc, "eta", "scenario");
    c.scenario.base_load = num(sc, "base_load", "scenario");
    c.scenario.events.clear();
    if (!sc.at("events").is_array()) throw ConfigError("scenario.events must be an array");
    for (const auto& e : sc.at("events")) {
      c.scenario.events.push_back({num(e, "time", "scenario.events"), num(e, "delta_p", "scenario.events")});
    }
    c.scenario.duration = num(sc, "duration", "scenario");
    c.scenario.dt = num(sc, "dt", "scenario");
    c.scenario.output_dt = num(sc, "output_dt", "scenario");
    c.scenario.validate();

    c.plant.v_w = c.scenario.v_w;
    c.plant.network.base_load = c.scenario.base_load;
    c.plant.network.events = c.scenario.events;
    c.plant.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Config load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path.string());
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

json to_json(const Config& c) {
  json doc = default_config_json();
  const auto& tp = c.plant.turbine;
  doc["turbine"]["air_density"] = tp.air_density;
  doc["turbine"]["rotor_radius"] = tp.rotor_radius;
  doc["turbine"]["inertia"] = tp.inertia;
  doc["turbine"]["omega_nom"] = tp.omega_nom;
  doc["turbine"]["omega_max_pu"] = tp.omega_max_pu;
  doc["turbine"]["rated_power"] = tp.rated_power;
  doc["turbine"]["rated_wind"] = tp.rated_wind;
  doc["turbine"]["n_agg"] = tp.n_agg;
  doc["sg"] = {{"inertia_h", c.plant.sg.inertia_h}, {"rating", c.plant.sg.rating}, {"t_g", c.plant.sg.t_g},
               {"k_g", c.plant.sg.k_g}};
  const auto& net = c.plant.network;
  doc["network"] = {{"b_g", net.b_g},
                    {"b_msc", net.b_msc},
                    {"s_base", net.s_base},
                    {"v_dc_base", net.v_dc_base},
                    {"dc_capacitance", net.dc_capacitance},
                    {"f_base", net.f_base},
                    {"f_machine_base", net.f_machine_base}};
  doc["control"]["gsc"] = converter_to(c.gains.gsc);
  doc["control"]["msc"] = converter_to(c.gains.msc);
  doc["control"]["design"]["d_omega_max"] = c.design.d_omega_max;
  doc["control"]["design"]["d_vdc_max"] = c.design.d_vdc_max;
  const auto& sc = c.scenario;
  json events = json::array();
  for (const auto& e : sc.events) events.push_back({{"time", e.time}, {"delta_p", e.delta_p}});
  doc["scenario"] = {{"mode", to_string(sc.mode)}, {"v_w", sc.v_w},           {"eta", sc.eta},
                     {"base_load", sc.base_load},  {"events", events},         {"duration", sc.duration},
                     {"dt", sc.dt},                {"output_dt", sc.output_dt}};
  return doc;
}

PreparedRun prepare_run(const Config& config) {
  const auto& sc = config.scenario;
  const double eta = sc.mode == Mode::GfmFr ? sc.eta : 1.0;
  GainDesign design = design_gains(config.plant.turbine, config.plant.surface, sc.v_w, eta, config.design, config.gains);
  ControlGains g = design.gains;
  const auto& user = config.gains;
  auto pinned = [&](const char* k) { return config.pinned.count(k) > 0; };
  if (pinned("gsc.k_theta")) g.gsc.k_theta = user.gsc.k_theta;
  if (pinned("msc.k_theta")) g.msc.k_theta = user.msc.k_theta;
  if (pinned("msc.k_d")) g.msc.k_d = user.msc.k_d;
  if (pinned("pitch.k_p")) g.pitch.k_p = user.pitch.k_p;
  if (pinned("omega_del")) g.omega_del = user.omega_del;
  if (pinned("pitch.beta_del_deg")) g.pitch.beta_del_deg = user.pitch.beta_del_deg;

  PlantParams plant = config.plant;
  plant.v_w = sc.v_w;
  plant.network.base_load = sc.base_load;
  plant.network.events = sc.events;
  return {design, ClosedLoop(plant, g, sc.mode)};
}

namespace {

void record(SimTrace& tr, const ClosedLoop& loop, const State& x, double t) {
  const double f0 = loop.params().network.f_base;
  const PlantOutputs o = loop.outputs(x, loop.params().network.load_at(t));
  tr.t.push_back(t);
  tr.f_g.push_back(f0 * x[idx::omega_g]);
  tr.f_gsc.push_back(f0 * o.omega_gsc);
  tr.v_dc.push_back(loop.mode() == Mode::GflMppt ? 1.0 : x[idx::v_dc]);
  tr.omega_r.push_back(x[idx::omega_r]);
  tr.beta.push_back(x[idx::beta]);
  tr.p_wt.push_back(o.p_wt);
  tr.p_gsc.push_back(o.p_gsc);
  tr.p_g.push_back(x[idx::p_g]);
  tr.omega_msc.push_back(o.omega_msc);
  tr.p_load.push_back(o.p_load);
}

}  // namespace

State integrate(const ClosedLoop& loop, State x, double t0, double t1, double dt) {
  const long n = std::lround((t1 - t0) / dt);
  for (long k = 0; k < n; ++k) x = step_rk4(loop, x, t0 + static_cast<double>(k) * dt, dt);
  return x;
}

RunResult run_scenario(const Config& config) {
  config.scenario.validate();
  PreparedRun prep = prepare_run(config);
  ClosedLoop& loop = prep.loop;
  RunResult r;
  r.scenario = config.scenario;
  r.design = prep.design;
  r.gains = loop.gains();
  r.wt_scale = loop.params().wt_scale();
  r.equilibrium = find_equilibrium(loop);

  const auto& sc = config.scenario;
  const long n = std::lround(sc.duration / sc.dt);
  const long every = std::lround(sc.output_dt / sc.dt);
  r.trace.reserve(static_cast<std::size_t>(n / every + 1));
  State x = r.equilibrium.x;
  record(r.trace, loop, x, 0.0);
  const double c_dc = loop.params().c_dc();
  const bool gfm = loop.mode() != Mode::GflMppt;
  for (long k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const State next = step_rk4(loop, x, t, sc.dt);
    if (gfm) {
      const State mid = 0.5 * (x + next);
      const PlantOutputs o = loop.outputs(mid, loop.params().network.load_at(t + 0.5 * sc.dt));
      const double lhs = c_dc * mid[idx::v_dc] * (next[idx::v_dc] - x[idx::v_dc]) / sc.dt;
      r.max_dc_energy_residual = std::max(r.max_dc_energy_residual, std::abs(lhs - (o.p_pmsg - o.p_gsc)));
    }
    x = next;
    if ((k + 1) % every == 0) record(r.trace, loop, x, static_cast<double>(k + 1) * sc.dt);
  }
  return r;
}

std::vector<CheckResult> steady_state_checks(const RunResult& run, double f_base) {
  std::vector<CheckResult> out;
  const auto& tr = run.trace;
  const auto& g = run.gains;
  const auto mode = run.scenario.mode;
  if (mode == Mode::GflMppt || tr.size() < 3) return out;
  const double t_end = tr.t.back();
  const double dt = tr.t[1] - tr.t[0];
  const double s0 = t_end - 2.0 + 0.5 * dt;
  const double s1 = t_end + dt;
  const double v = window_mean(tr, tr.v_dc, s0, s1);
  const double w_g = window_mean(tr, tr.f_g, s0, s1) / f_base;
  const double w_gsc = window_mean(tr, tr.f_gsc, s0, s1) / f_base;
  const double w_msc = window_mean(tr, tr.omega_msc, s0, s1);
  const double w_r = window_mean(tr, tr.omega_r, s0, s1);
  const double dv = v - g.v_dc_star;
  auto add = [&](std::string name, double value, double limit) {
    out.push_back({std::move(name), value, limit, value < limit});
  };
  add("gsc_vdc_proportionality", std::abs((w_gsc - g.omega_0) - g.gsc.k_theta * dv), 1e-3);
  add("msc_vdc_proportionality", std::abs((w_msc - g.omega_del) - g.msc.k_theta * dv), 1e-3);
  add("gsc_grid_sync", std::abs(w_gsc - w_g), 1e-4);
  add("msc_rotor_sync", std::abs(w_msc - w_r), 1e-4);

  if (run.scenario.events.empty()) return out;
  const auto m = compute_metrics(tr, run.scenario.first_event_time(), f_base);
  if (mode == Mode::GfmMppt) add("mppt_inertia_only", std::abs(m.dp_wt_ss), 0.005);
  if (mode == Mode::GfmFr && run.design.has_droop) {
    const double expected = run.design.m_p / run.wt_scale;
    add("droop_vs_design", std::abs(m.droop - expected) / expected, 0.02);
  }
  return out;
}

bool CompareReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

CompareReport compare_modes(const Config& base) {
  std::vector<Config> configs(3, base);
  configs[0].scenario.mode = Mode::GflMppt;
  configs[1].scenario.mode = Mode::GfmMppt;
  configs[2].scenario.mode = Mode::GfmFr;
  auto results = run_batch(configs);

  CompareReport rep;
  const double t_ev = base.scenario.first_event_time();
  const double f0 = base.plant.network.f_base;
  for (std::size_t i = 0; i < 3; ++i) {
    rep.runs[i].mode = configs[i].scenario.mode;
    rep.runs[i].run = std::move(results[i]);
    rep.runs[i].metrics = compute_metrics(rep.runs[i].run.trace, t_ev, f0);
  }
  const auto& gfl = rep.runs[0].metrics;
  const auto& mppt = rep.runs[1].metrics;
  const auto& fr = rep.runs[2].metrics;
  const auto& fr_tr = rep.runs[2].run.trace;
  auto flag = [&](std::string name, bool ok, double value) { rep.checks.push_back({std::move(name), value, 0.0, ok}); };

  flag("nadir_fr_above_mppt", fr.nadir > mppt.nadir, fr.nadir - mppt.nadir);
  flag("nadir_mppt_not_below_gfl", mppt.nadir >= gfl.nadir - 1e-9, mppt.nadir - gfl.nadir);
  flag("f_ss_fr_above_gfl", fr.f_ss > gfl.f_ss, fr.f_ss - gfl.f_ss);
  flag("f_ss_fr_above_mppt", fr.f_ss > mppt.f_ss, fr.f_ss - mppt.f_ss);

  const double pre0 = std::max(0.0, t_ev - 1.0);
  const double v_pre = window_mean(fr_tr, fr_tr.v_dc, pre0, t_ev);
  const double w_pre = window_mean(fr_tr, fr_tr.omega_r, pre0, t_ev);
  const double b_pre = window_mean(fr_tr, fr_tr.beta, pre0, t_ev);
  double v_min = v_pre;
  for (std::size_t k = 0; k < fr_tr.size(); ++k) {
    if (fr_tr.t[k] >= t_ev) v_min = std::min(v_min, fr_tr.v_dc[k]);
  }
  flag("fr_vdc_dips", v_min < v_pre, v_min - v_pre);
  flag("fr_rotor_decelerates", fr_tr.omega_r.back() < w_pre, fr_tr.omega_r.back() - w_pre);
  flag("fr_wind_power_rises", fr.dp_wt_ss > 0.0, fr.dp_wt_ss);
  if (b_pre > 0.0) flag("fr_pitch_decreases", fr_tr.beta.back() < b_pre, fr_tr.beta.back() - b_pre);
  return rep;
}

}  // namespace wtgfm
