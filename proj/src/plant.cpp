#include "wtgfm/plant.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

namespace wtgfm {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::GflMppt:
      return "GFL_MPPT";
    case Mode::GfmMppt:
      return "GFM_MPPT";
    case Mode::GfmFr:
      return "GFM_FR";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (t == "GFL_MPPT") return Mode::GflMppt;
  if (t == "GFM_MPPT") return Mode::GfmMppt;
  if (t == "GFM_FR") return Mode::GfmFr;
  throw ConfigError("unknown mode '" + text + "' (expected GFL_MPPT, GFM_MPPT or GFM_FR)");
}

void SgParams::validate() const {
  if (!(inertia_h > 0.0 && rating > 0.0 && t_g > 0.0 && k_g > 0.0)) {
    throw ConfigError("sg parameters must be strictly positive");
  }
}

void NetworkParams::validate() const {
  if (!(b_g > 0.0 && b_msc > 0.0)) throw ConfigError("line susceptances must be > 0");
  if (!(s_base > 0.0 && v_dc_base > 0.0 && dc_capacitance > 0.0)) throw ConfigError("network bases must be > 0");
  if (!(f_base > 0.0 && f_machine_base > 0.0)) throw ConfigError("frequency bases must be > 0");
  for (const auto& e : events) {
    if (!(e.time >= 0.0) || !std::isfinite(e.delta_p)) throw ConfigError("invalid load event");
  }
}

double NetworkParams::load_at(double t) const {
  double p = base_load;
  for (const auto& e : events) {
    if (t >= e.time) p += e.delta_p;
  }
  return p;
}

double pmsg_power(double b_msc, double theta_r, double theta_msc) { return b_msc * std::sin(theta_r - theta_msc); }

double gsc_power(const std::vector<Line>& lines, double theta_gsc) {
  if (lines.empty()) throw DomainError("gsc_power needs at least one line");
  double p = 0.0;
  for (const auto& l : lines) p += l.b * std::sin(theta_gsc - l.theta);
  return p;
}

void PlantParams::validate() const {
  turbine.validate();
  sg.validate();
  network.validate();
  if (!(v_w > 0.0)) throw ConfigError("wind speed must be > 0");
}

double PlantParams::wt_scale() const { return turbine.n_agg * turbine.rated_power / network.s_base; }

double PlantParams::j_wt() const {
  return turbine.n_agg * turbine.inertia * turbine.omega_nom * turbine.omega_nom / network.s_base;
}

double PlantParams::c_dc() const {
  return turbine.n_agg * network.dc_capacitance * network.v_dc_base * network.v_dc_base / network.s_base;
}

double PlantParams::wind_power(double omega_r_pu, double beta_deg) const {
  return wt_scale() * wind_power_pu(turbine, surface, v_w, omega_r_pu, beta_deg);
}

const char* state_label(int i) {
  static const std::array<const char*, kStateSize> names{
      "theta_g", "omega_g", "p_g",   "theta_gsc", "theta_r", "omega_r", "theta_msc", "v_dc",
      "x_gsc",   "x_msc",   "q_gsc", "q_msc",     "beta",    "z_speed", "z_power"};
  return names.at(static_cast<std::size_t>(i));
}

ControllerState controller_state(const State& x) {
  ControllerState c;
  c.x_gsc = x[idx::x_gsc];
  c.x_msc = x[idx::x_msc];
  c.q_gsc = x[idx::q_gsc];
  c.q_msc = x[idx::q_msc];
  c.theta_gsc = x[idx::theta_gsc];
  c.theta_msc = x[idx::theta_msc];
  c.beta = x[idx::beta];
  c.z_speed = x[idx::z_speed];
  c.z_power = x[idx::z_power];
  return c;
}

ClosedLoop::ClosedLoop(PlantParams params, ControlGains gains, Mode mode)
    : params_(std::move(params)), gains_(gains), mode_(mode) {
  params_.validate();
  gains_.validate();
}

PlantOutputs ClosedLoop::outputs(const State& x, double p_load) const {
  PlantOutputs o;
  o.p_load = p_load;
  const auto& net = params_.network;
  if (mode_ == Mode::GflMppt) {
    o.p_gsc = p_gfl;
    o.p_pmsg = p_gfl;
    o.p_wt = p_gfl;
    o.omega_gsc = x[idx::omega_g];
    o.omega_msc = x[idx::omega_r];
    return o;
  }
  const double v = x[idx::v_dc];
  const double dv_in = v - gains_.v_dc_star;
  o.p_pmsg = pmsg_power(net.b_msc, x[idx::theta_r], x[idx::theta_msc]);
  o.p_gsc = net.b_g * std::sin(x[idx::theta_gsc] - x[idx::theta_g]);
  o.dv_dc = (o.p_pmsg - o.p_gsc) / (params_.c_dc() * v);
  auto freq = [&](const ConverterGains& g, double xf, double ref) {
    if (g.t_dc > 0.0) return ref + pd_filter(g.k_theta, g.k_d, g.t_dc, xf, dv_in).y;
    return ref + g.k_theta * dv_in + g.k_d * o.dv_dc;
  };
  o.omega_gsc = freq(gains_.gsc, x[idx::x_gsc], gains_.omega_0);
  o.omega_msc = freq(gains_.msc, x[idx::x_msc], gains_.omega_del);
  o.p_wt = params_.wind_power(x[idx::omega_r], x[idx::beta]);
  o.pitch = pitch_reference(gains_.pitch, gains_.omega_del, x[idx::z_speed], x[idx::z_power], x[idx::omega_r],
                            o.p_pmsg / params_.wt_scale());
  return o;
}

State ClosedLoop::derivative(const State& x, double p_load) const {
  const auto& net = params_.network;
  const double wb = net.omega_base();
  const double j_g = params_.j_g();
  State d = State::Zero();
  const PlantOutputs o = outputs(x, p_load);

  d[idx::theta_g] = wb * (x[idx::omega_g] - gains_.omega_0);
  d[idx::omega_g] = (x[idx::p_g] + o.p_gsc - p_load) / (j_g * x[idx::omega_g]);
  d[idx::p_g] = (p_g_set - x[idx::p_g] - params_.k_g() * (x[idx::omega_g] - 1.0)) / params_.sg.t_g;
  if (mode_ == Mode::GflMppt) return d;

  const double wbm = net.omega_machine_base();
  const double dv_in = x[idx::v_dc] - gains_.v_dc_star;
  d[idx::theta_gsc] = wb * (o.omega_gsc - gains_.omega_0);
  d[idx::theta_r] = wbm * (x[idx::omega_r] - gains_.omega_del);
  d[idx::theta_msc] = wbm * (o.omega_msc - gains_.omega_del);
  d[idx::omega_r] = (o.p_wt - o.p_pmsg) / (params_.j_wt() * x[idx::omega_r]);
  d[idx::v_dc] = o.dv_dc;
  if (gains_.gsc.t_dc > 0.0) d[idx::x_gsc] = (dv_in - x[idx::x_gsc]) / gains_.gsc.t_dc;
  if (gains_.msc.t_dc > 0.0) d[idx::x_msc] = (dv_in - x[idx::x_msc]) / gains_.msc.t_dc;
  // reactive channels see no network coupling: Q_meas = 0
  d[idx::q_gsc] = qv_droop(gains_.gsc, x[idx::q_gsc], 0.0).dx;
  d[idx::q_msc] = qv_droop(gains_.msc, x[idx::q_msc], 0.0).dx;
  d[idx::beta] = pitch_servo_rate(gains_.pitch, x[idx::beta], o.pitch.beta_ref);
  d[idx::z_speed] = o.pitch.dz_speed;
  d[idx::z_power] = o.pitch.dz_power;
  return d;
}

void ClosedLoop::check_state(const State& x, double t) const {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << what << " at t = " << t << " s";
    throw DivergenceError(os.str());
  };
  for (int i = 0; i < kStateSize; ++i) {
    if (!std::isfinite(x[i])) fail(std::string("non-finite ") + state_label(i));
    if (std::abs(x[i]) > 1e6) fail(std::string("state ") + state_label(i) + " exceeded 1e6");
  }
  if (mode_ == Mode::GflMppt) return;
  if (x[idx::v_dc] <= 0.0) fail("v_dc <= 0");
  if (x[idx::omega_r] <= 0.0) fail("omega_r <= 0");
}

State step_rk4(const ClosedLoop& loop, const State& x, double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("step_rk4 needs dt > 0");
  const double load = loop.params().network.load_at(t + 0.5 * dt);
  State next = rk4_step([&](const State& s) { return loop.derivative(s, load); }, x, dt);
  loop.check_state(next, t + dt);
  return next;
}

EquilibriumReport find_equilibrium(ClosedLoop& loop) {
  const auto& p = loop.params();
  const auto& g = loop.gains();
  const auto& net = p.network;
  const double load = net.load_at(0.0);

  State x = State::Zero();
  x[idx::omega_g] = 1.0;
  x[idx::v_dc] = 1.0;
  x[idx::omega_r] = g.omega_del;
  x[idx::beta] = std::clamp(g.pitch.beta_del_deg, g.pitch.beta_min, g.pitch.beta_max);

  double p_inj = 0.0;
  if (loop.mode() == Mode::GflMppt) {
    loop.p_gfl = p.wt_scale() * gfl_mppt_emulation(p.turbine, p.surface, p.v_w).p_gsc;
    p_inj = loop.p_gfl;
  } else {
    p_inj = p.wind_power(g.omega_del, x[idx::beta]);
  }
  if (std::abs(p_inj) >= net.b_g || std::abs(p_inj) >= net.b_msc) {
    throw ConvergenceError("operating power exceeds line transfer limit");
  }
  x[idx::theta_gsc] = std::asin(p_inj / net.b_g);
  x[idx::theta_r] = std::asin(p_inj / net.b_msc);
  x[idx::p_g] = load - p_inj;
  loop.p_g_set = x[idx::p_g];

  EquilibriumReport rep;
  auto f = [&](const State& s) { return loop.derivative(s, load); };
  State r = f(x);
  if (loop.mode() == Mode::GflMppt) {
    rep.x = x;
    rep.residual = r.norm();
    return rep;
  }

  // theta_g, theta_msc fix the frames; q and limiter states stay at rest
  static constexpr std::array<int, 9> free_idx{idx::omega_g, idx::p_g,   idx::theta_gsc, idx::theta_r, idx::omega_r,
                                               idx::v_dc,    idx::x_gsc, idx::x_msc,     idx::beta};
  constexpr int n = static_cast<int>(free_idx.size());
  for (rep.iterations = 0; rep.iterations < 100 && r.norm() >= 1e-13; ++rep.iterations) {
    Eigen::Matrix<double, kStateSize, n> jac;
    for (int k = 0; k < n; ++k) {
      const int i = free_idx[static_cast<std::size_t>(k)];
      const double h = 1e-7 * std::max(1.0, std::abs(x[i]));
      State xp = x;
      State xm = x;
      xp[i] += h;
      xm[i] -= h;
      jac.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    const Eigen::Matrix<double, n, 1> step = jac.colPivHouseholderQr().solve(-r);
    State trial = x;
    for (int k = 0; k < n; ++k) trial[free_idx[static_cast<std::size_t>(k)]] += step[k];
    const State rt = f(trial);
    if (!(rt.norm() < r.norm())) break;
    x = trial;
    r = rt;
  }
  rep.x = x;
  rep.residual = r.norm();
  if (!(rep.residual < 1e-9)) {
    std::ostringstream os;
    os << "equilibrium residual " << rep.residual << " after " << rep.iterations << " iterations";
    throw ConvergenceError(os.str());
  }
  return rep;
}

}  // namespace wtgfm
