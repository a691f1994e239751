#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wtgfm/aero.hpp"
#include "wtgfm/control.hpp"
#include "wtgfm/errors.hpp"

namespace wtgfm {

enum class Mode { GflMppt, GfmMppt, GfmFr };

std::string to_string(Mode mode);
/// Accepts GFL_MPPT, GFM_MPPT, GFM_FR (case-insensitive).
Mode parse_mode(const std::string& text);

/// Synchronous generator on its own rating.
struct SgParams {
  double inertia_h = 4.0;  // s
  double rating = 210e6;   // VA
  double t_g = 0.5;        // s, turbine/governor lag
  double k_g = 20.0;       // pu/pu on own base (1/droop)

  void validate() const;
  /// J_g on the system base: 2 H S_sg / S_base
  double inertia_pu(double s_base) const { return 2.0 * inertia_h * rating / s_base; }
  double gain_pu(double s_base) const { return k_g * rating / s_base; }
};

struct LoadEvent {
  double time = 0.0;     // s
  double delta_p = 0.0;  // pu
};

struct NetworkParams {
  double b_g = 3.0;                // pu, GSC-SG line
  double b_msc = 1.5;              // pu, PMSG-MSC link
  double s_base = 50e6;            // VA
  double v_dc_base = 7920.0;       // V
  double dc_capacitance = 31.88e-3;  // F per turbine
  double f_base = 50.0;            // Hz, grid
  double f_machine_base = 10.0;    // Hz, PMSG electrical at 1 pu rotor speed
  double base_load = 2.0;          // pu
  std::vector<LoadEvent> events;

  void validate() const;
  double omega_base() const { return 2.0 * kPi * f_base; }
  double omega_machine_base() const { return 2.0 * kPi * f_machine_base; }
  /// Right-continuous piecewise-constant load profile.
  double load_at(double t) const;
};

/// b_msc sin(theta_r - theta_msc)
double pmsg_power(double b_msc, double theta_r, double theta_msc);

struct Line {
  double b = 0.0;
  double theta = 0.0;
};

/// sum_k b_k sin(theta_gsc - theta_k)
double gsc_power(const std::vector<Line>& lines, double theta_gsc);

/// Physical constants of the closed loop, all powers on S_base.
struct PlantParams {
  TurbineParams turbine;
  CpSurface surface = CpSurface::standard();
  SgParams sg;
  NetworkParams network;
  double v_w = 8.0;  // m/s

  void validate() const;
  /// aggregated WT rating / S_base
  double wt_scale() const;
  /// n J omega_nom^2 / S_base
  double j_wt() const;
  /// n C V^2 / S_base
  double c_dc() const;
  double j_g() const { return sg.inertia_pu(network.s_base); }
  double k_g() const { return sg.gain_pu(network.s_base); }
  /// P_wt on S_base with omega_r in pu.
  double wind_power(double omega_r_pu, double beta_deg) const;
};

namespace idx {
enum : int {
  theta_g = 0,
  omega_g,
  p_g,
  theta_gsc,
  theta_r,
  omega_r,
  theta_msc,
  v_dc,
  x_gsc,
  x_msc,
  q_gsc,
  q_msc,
  beta,
  z_speed,
  z_power,
  count
};
}

inline constexpr int kStateSize = idx::count;
using State = Eigen::Matrix<double, kStateSize, 1>;

const char* state_label(int i);

ControllerState controller_state(const State& x);

/// Instantaneous algebraic quantities at a state.
struct PlantOutputs {
  double p_wt = 0.0;
  double p_pmsg = 0.0;
  double p_gsc = 0.0;
  double p_load = 0.0;
  double omega_gsc = 0.0;
  double omega_msc = 0.0;
  double dv_dc = 0.0;
  PitchCommand pitch;
};

/// Closed loop of the aggregated WT, DC link, converters, line and SG.
///
/// Angles live in frames rotating at omega_0 (grid side) and omega_del
/// (machine side): d theta = omega_base (omega - omega_ref).
class ClosedLoop {
 public:
  ClosedLoop(PlantParams params, ControlGains gains, Mode mode);

  const PlantParams& params() const { return params_; }
  const ControlGains& gains() const { return gains_; }
  Mode mode() const { return mode_; }

  /// Governor setpoint and GFL injection, fixed by find_equilibrium.
  double p_g_set = 0.0;
  double p_gfl = 0.0;

  State derivative(const State& x, double p_load) const;
  State derivative_at(const State& x, double t) const { return derivative(x, params_.network.load_at(t)); }
  PlantOutputs outputs(const State& x, double p_load) const;

  /// Throws DivergenceError on v_dc <= 0, omega_r <= 0 or non-finite entries.
  void check_state(const State& x, double t) const;

 private:
  PlantParams params_;
  ControlGains gains_;
  Mode mode_;
};

/// One classical RK4 step of dx/dt = f(x).
template <class F, class Vec>
Vec rk4_step(F&& f, const Vec& x, double dt) {
  const Vec k1 = f(x);
  const Vec k2 = f(Vec(x + 0.5 * dt * k1));
  const Vec k3 = f(Vec(x + 0.5 * dt * k2));
  const Vec k4 = f(Vec(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// RK4 step of the closed loop with the load held at its value on [t, t+dt).
State step_rk4(const ClosedLoop& loop, const State& x, double t, double dt);

struct EquilibriumReport {
  State x;
  double residual = 0.0;
  int iterations = 0;
};

/// Closed-form seed (v_dc = 1, omega_r = omega_del, arcsin line angles)
/// polished by Gauss-Newton to a derivative norm below 1e-9. Sets
/// loop.p_g_set and loop.p_gfl.
EquilibriumReport find_equilibrium(ClosedLoop& loop);

}  // namespace wtgfm
