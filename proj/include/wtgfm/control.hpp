#pragma once

#include "wtgfm/aero.hpp"

namespace wtgfm {

/// Dual-port GFM gains for one converter. The DC-voltage channel is
/// H(s) = (k_theta + k_d s) / (t_dc s + 1).
struct ConverterGains {
  double k_theta = 0.5;  // pu freq / pu Vdc
  double k_d = 0.0067;   // pu freq s / pu Vdc
  double t_dc = 0.005;   // s
  double k_q = 0.02;     // pu V / pu Q
  double t_v = 0.05;     // s
  double v_star = 1.0;
  double q_star = 0.0;
};

struct PitchGains {
  double k_p = 0.0;           // deg / pu speed
  double beta_del_deg = 0.0;  // setpoint
  // one-sided limiter PIs; outputs add pitch
  double kp_speed = 50.0;     // deg / pu
  double ki_speed = 50.0;     // deg / (pu s)
  double kp_power = 20.0;
  double ki_power = 20.0;
  double p_max_msc = 1.2;     // pu
  double omega_max_pu = 1.2;  // pu
  double t_servo = 0.3;       // s
  double rate_limit = 8.0;    // deg/s
  double beta_min = 0.0;
  double beta_max = 30.0;
};

struct ControlGains {
  ConverterGains gsc;
  ConverterGains msc{0.5, 0.0067, 0.005, 0.05, 0.05, 1.0, 0.0};
  double v_dc_star = 1.0;
  double omega_0 = 1.0;
  double omega_del = 1.0;  // pu rotor speed setpoint
  PitchGains pitch;

  /// K_d^gsc / K_theta^gsc == K_d^msc / K_theta^msc within 1e-9 (relative).
  bool ratio_condition() const;
  void validate() const;
};

/// Filter states, integrator angles, pitch servo and limiter integrators.
struct ControllerState {
  double x_gsc = 0.0;
  double x_msc = 0.0;
  double q_gsc = 0.0;
  double q_msc = 0.0;
  double theta_gsc = 0.0;  // rad, grid frame
  double theta_msc = 0.0;  // rad, machine frame
  double beta = 0.0;       // deg
  double z_speed = 0.0;
  double z_power = 0.0;
};

struct FilterOutput {
  double y = 0.0;
  double dx = 0.0;
};

/// State-space realization of (k_theta + k_d s)/(t_dc s + 1):
/// dx = (u - x)/t_dc, y = (k_theta - k_d/t_dc) x + (k_d/t_dc) u.
FilterOutput pd_filter(double k_theta, double k_d, double t_dc, double x, double u);

/// omega_0 + H_gsc(v_dc - v_dc_star)
double gsc_frequency(const ControlGains& gains, double x_gsc, double v_dc);
/// omega_del + H_msc(v_dc - v_dc_star)
double msc_frequency(const ControlGains& gains, double x_msc, double v_dc);

/// V = V_star + K_q (Q_star - q), q the lagged measurement; dx is dq/dt.
FilterOutput qv_droop(const ConverterGains& g, double q_state, double q_meas);

struct PitchCommand {
  double beta_ref = 0.0;  // clamped to [beta_min, beta_max]
  double u_speed = 0.0;
  double u_power = 0.0;
  double dz_speed = 0.0;
  double dz_power = 0.0;
};

/// beta_del + K_p (omega_r - omega_del) + u_speed + u_power.
PitchCommand pitch_reference(const PitchGains& p, double omega_del, double z_speed, double z_power,
                             double omega_r, double p_msc);

/// First-order servo with rate limit; holds at the range ends.
double pitch_servo_rate(const PitchGains& p, double beta, double beta_ref);

/// Idealized grid-following MPPT: constant injection, pinned DC voltage.
struct GflInjection {
  double p_gsc = 0.0;  // pu
  double v_dc = 1.0;
};

GflInjection gfl_mppt_emulation(const TurbineParams& params, const CpSurface& surface, double v_w);

}  // namespace wtgfm
