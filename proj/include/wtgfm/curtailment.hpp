#pragma once

#include <iosfwd>
#include <vector>

#include "wtgfm/aero.hpp"

namespace wtgfm {

/// Curtailed operating point for one (wind speed, deloading) pair.
struct DeloadPoint {
  double v_w = 0.0;           // m/s
  double eta = 1.0;           // fraction of available power
  double lambda_del = 0.0;    // overspeed tip-speed ratio solving Cp(l, 0) = target
  double omega_del_pu = 0.0;  // rotor speed setpoint, pu of omega_nom
  double beta_del_deg = 0.0;  // pitch setpoint
  double target_cp = 0.0;     // Cp delivered at (omega_del, beta_del)
};

/// lambda >= lambda_mpp with Cp(lambda, 0) = target_cp, by bisection.
double solve_speed_deload_target(const CpSurface& surface, const MaxPowerPoint& mpp, double target_cp);

/// lambda_del with Cp(lambda_del, 0) = eta * Cp_max; eta = 1 gives lambda_mpp.
double solve_speed_deload(const CpSurface& surface, double eta);

/// beta in [0, 30] deg with Cp(lambda_capped, beta) = eta * target_cp; 0 when
/// the target is already met without pitching.
double solve_pitch_deload(const CpSurface& surface, double lambda_capped, double eta, double target_cp);

/// Overspeed first, pitch once the rotor sits at omega_max. Above rated wind
/// the target is eta * rated power.
DeloadPoint deload_point(const TurbineParams& params, const CpSurface& surface, double v_w, double eta);
DeloadPoint deload_point(const TurbineParams& params, const CpSurface& surface, const MaxPowerPoint& mpp,
                         double v_w, double eta);

/// Mechanical power (pu) at the point's (omega_del, beta_del).
double deload_power_pu(const TurbineParams& params, const CpSurface& surface, const DeloadPoint& point);

/// Rotor speed (pu) at lambda_mpp, capped at omega_max.
double mpp_rotor_speed_pu(const TurbineParams& params, const MaxPowerPoint& mpp, double v_w);

class DeloadTable {
 public:
  DeloadTable() = default;
  DeloadTable(std::vector<double> v_grid, std::vector<double> eta_grid, std::vector<DeloadPoint> cells);

  const std::vector<double>& wind_grid() const { return v_grid_; }
  const std::vector<double>& eta_grid() const { return eta_grid_; }
  const std::vector<DeloadPoint>& cells() const { return cells_; }
  const DeloadPoint& at(std::size_t i_wind, std::size_t i_eta) const;

  /// Bilinear in (v_w, eta); DomainError outside the grid.
  DeloadPoint lookup(double v_w, double eta) const;

 private:
  std::vector<double> v_grid_;
  std::vector<double> eta_grid_;
  std::vector<DeloadPoint> cells_;  // wind-outer
};

/// 4..14 m/s step 0.5
std::vector<double> default_wind_grid();
/// 0.70..1.00 step 0.05
std::vector<double> default_eta_grid();

/// OpenMP over cells.
DeloadTable build_table(const TurbineParams& params, const CpSurface& surface, const std::vector<double>& v_grid,
                        const std::vector<double>& eta_grid);
/// Single-threaded reference for build_table.
DeloadTable build_table_serial(const TurbineParams& params, const CpSurface& surface,
                               const std::vector<double>& v_grid, const std::vector<double>& eta_grid);

/// `v_w,eta,lambda_del,omega_del_pu,beta_del_deg`
void write_deload_csv(std::ostream& out, const DeloadTable& table);
DeloadTable read_deload_csv(std::istream& in);

}  // namespace wtgfm
