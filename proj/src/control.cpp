#include "wtgfm/control.hpp"

#include <algorithm>
#include <cmath>

#include "wtgfm/errors.hpp"

namespace wtgfm {

namespace {

void check_converter(const ConverterGains& g, const char* name) {
  const std::string n(name);
  if (!(g.k_theta > 0.0)) throw ConfigError(n + ".k_theta must be > 0");
  if (!(g.k_d >= 0.0)) throw ConfigError(n + ".k_d must be >= 0");
  if (!(g.t_dc >= 0.0)) throw ConfigError(n + ".t_dc must be >= 0");
  if (!(g.t_v > 0.0)) throw ConfigError(n + ".t_v must be > 0");
}

}  // namespace

bool ControlGains::ratio_condition() const {
  const double a = gsc.k_d / gsc.k_theta;
  const double b = msc.k_d / msc.k_theta;
  return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300});
}

void ControlGains::validate() const {
  check_converter(gsc, "gsc");
  check_converter(msc, "msc");
  if (!(omega_del > 0.0)) throw ConfigError("omega_del must be > 0");
  if (!(pitch.t_servo > 0.0)) throw ConfigError("pitch.t_servo must be > 0");
  if (!(pitch.rate_limit > 0.0)) throw ConfigError("pitch.rate_limit must be > 0");
  if (!(pitch.beta_max > pitch.beta_min)) throw ConfigError("pitch range is empty");
  if (pitch.k_p < 0.0) throw ConfigError("pitch.k_p must be >= 0");
  if (pitch.ki_speed < 0.0 || pitch.ki_power < 0.0 || pitch.kp_speed < 0.0 || pitch.kp_power < 0.0) {
    throw ConfigError("pitch limiter gains must be >= 0");
  }
}

FilterOutput pd_filter(double k_theta, double k_d, double t_dc, double x, double u) {
  if (t_dc <= 0.0) throw DomainError("pd_filter needs t_dc > 0");
  const double r = k_d / t_dc;
  return {(k_theta - r) * x + r * u, (u - x) / t_dc};
}

double gsc_frequency(const ControlGains& gains, double x_gsc, double v_dc) {
  const auto& g = gains.gsc;
  return gains.omega_0 + pd_filter(g.k_theta, g.k_d, g.t_dc, x_gsc, v_dc - gains.v_dc_star).y;
}

double msc_frequency(const ControlGains& gains, double x_msc, double v_dc) {
  const auto& g = gains.msc;
  return gains.omega_del + pd_filter(g.k_theta, g.k_d, g.t_dc, x_msc, v_dc - gains.v_dc_star).y;
}

FilterOutput qv_droop(const ConverterGains& g, double q_state, double q_meas) {
  if (g.t_v <= 0.0) throw DomainError("qv_droop needs t_v > 0");
  return {g.v_star + g.k_q * (g.q_star - q_state), (q_meas - q_state) / g.t_v};
}

PitchCommand pitch_reference(const PitchGains& p, double omega_del, double z_speed, double z_power,
                             double omega_r, double p_msc) {
  PitchCommand c;
  const double e_speed = omega_r - p.omega_max_pu;
  const double e_power = p_msc - p.p_max_msc;
  c.u_speed = std::max(0.0, p.kp_speed * e_speed + z_speed);
  c.u_power = std::max(0.0, p.kp_power * e_power + z_power);
  const double raw = p.beta_del_deg + p.k_p * (omega_r - omega_del) + c.u_speed + c.u_power;
  c.beta_ref = std::clamp(raw, p.beta_min, p.beta_max);

  // anti-windup: integrators stay >= 0 and hold while the pitch command is saturated
  const bool sat_high = raw >= p.beta_max;
  auto rate = [&](double z, double ki, double e) {
    const double dz = ki * e;
    if (dz < 0.0 && z <= 0.0) return 0.0;
    if (dz > 0.0 && sat_high) return 0.0;
    return dz;
  };
  c.dz_speed = rate(z_speed, p.ki_speed, e_speed);
  c.dz_power = rate(z_power, p.ki_power, e_power);
  return c;
}

double pitch_servo_rate(const PitchGains& p, double beta, double beta_ref) {
  double rate = std::clamp((beta_ref - beta) / p.t_servo, -p.rate_limit, p.rate_limit);
  if (beta <= p.beta_min && rate < 0.0) rate = 0.0;
  if (beta >= p.beta_max && rate > 0.0) rate = 0.0;
  return rate;
}

GflInjection gfl_mppt_emulation(const TurbineParams& params, const CpSurface& surface, double v_w) {
  const auto mpp = find_mpp(surface);
  const double omega = mpp.lambda * v_w / (params.rotor_radius * params.omega_nom);
  const double p_avail = wind_power_pu(params, surface, v_w, omega, 0.0);
  return {std::min(p_avail, 1.0), 1.0};
}

}  // namespace wtgfm
