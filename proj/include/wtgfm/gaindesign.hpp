#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wtgfm/aero.hpp"
#include "wtgfm/control.hpp"
#include "wtgfm/curtailment.hpp"

namespace wtgfm {

struct DesignSpec {
  double d_omega_max = 0.01;     // pu, largest expected grid frequency deviation
  double d_vdc_max = 0.02;       // pu, largest acceptable DC deviation
  double k_theta_msc_floor = 1.0;
  std::optional<double> target_mp;

  /// 0.01 / 0.02, reproduces the tabulated gains.
  static DesignSpec table3();
  /// 0.005 / 0.02
  static DesignSpec fig7();
  static DesignSpec preset(const std::string& name);
  void validate() const;
};

/// K_theta^gsc / (K_theta^msc (K_omega + K_beta K_p)); DomainError when the
/// stiffness K_theta^msc (K_omega + K_beta K_p) is not positive.
double droop_coefficient(double k_theta_gsc, double k_theta_msc, double k_omega, double k_beta, double k_p);

double max_gsc_gain(const DesignSpec& spec);

/// K_theta^gsc (omega_del - omega_mpp) / d_omega_max, or the floor when the
/// rotor has no headroom.
double max_msc_gain(const DesignSpec& spec, double k_theta_gsc, double omega_del, double omega_mpp);

/// (K_theta^gsc / K_theta^msc) beta_del / d_omega_max; zero for beta_del = 0.
double max_pitch_gain(const DesignSpec& spec, double k_theta_gsc, double k_theta_msc, double beta_del_deg);

struct GainDesign {
  DeloadPoint point;
  MaxPowerPoint mpp;
  double omega_mpp = 0.0;
  PowerSensitivities sens;
  ControlGains gains;
  double m_p = 0.0;
  bool has_droop = false;      // false for zero stiffness (MPPT)
  bool floor_applied = false;
  bool target_met = true;      // m_p <= spec.target_mp when requested
};

/// MPPT gain for the machine side when eta = 1.
inline constexpr double kMpptMscGain = 0.5;

/// deload_point -> find_mpp -> sensitivities -> K_theta^gsc -> K_theta^msc
/// -> K_p -> m_p, with K_d^msc = K_d^gsc K_theta^msc / K_theta^gsc. `base`
/// supplies everything not designed here (time constants, Q-V, limiters).
GainDesign design_gains(const TurbineParams& params, const CpSurface& surface, double v_w, double eta,
                        const DesignSpec& spec, const ControlGains& base = {});

enum class DroopStatus { Ok, NoDroop, TargetMissed, Infeasible };

std::string to_string(DroopStatus s);

struct DroopCell {
  double v_w = 0.0;
  double eta = 0.0;
  double m_p = 0.0;  // NaN unless status is Ok or TargetMissed
  DroopStatus status = DroopStatus::Infeasible;
};

struct DroopMap {
  std::vector<double> v_grid;
  std::vector<double> eta_grid;
  std::vector<DroopCell> cells;  // wind-outer
  const DroopCell& at(std::size_t i_wind, std::size_t i_eta) const { return cells.at(i_wind * eta_grid.size() + i_eta); }
};

DroopCell droop_cell(const TurbineParams& params, const CpSurface& surface, const MaxPowerPoint& mpp, double v_w,
                     double eta, const DesignSpec& spec);

/// OpenMP over cells.
DroopMap droop_map(const TurbineParams& params, const CpSurface& surface, const std::vector<double>& v_grid,
                   const std::vector<double>& eta_grid, const DesignSpec& spec);
DroopMap droop_map_serial(const TurbineParams& params, const CpSurface& surface, const std::vector<double>& v_grid,
                          const std::vector<double>& eta_grid, const DesignSpec& spec);

/// `v_w,eta,m_p,status`
void write_droop_csv(std::ostream& out, const DroopMap& map);

}  // namespace wtgfm
