#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wtgfm/control.hpp"
#include "wtgfm/plant.hpp"

namespace wtgfm {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Inputs of the 6-state linear model. Susceptances are the effective
/// values seen by angles measured in pu-seconds (b * omega_base).
struct LinearParams {
  double j_g = 1.0;
  double j_wt = 1.0;
  double c_dc = 1.0;
  double t_g = 1.0;
  double k_g = 1.0;
  double b_g = 1.0;
  double b_msc = 1.0;
  double omega_0 = 1.0;
  double omega_del = 1.0;
  double k_theta_gsc = 0.5;
  double k_d_gsc = 0.0;
  double k_theta_msc = 0.5;
  double k_d_msc = 0.0;
  double k_omega = 0.0;
  double k_beta = 0.0;
  double k_p = 0.0;
  bool tdc_zero = true;  // T_dc^gsc = T_dc^msc = 0 assumed

  /// Pulls constants from a plant and gain set; k_omega/k_beta are
  /// rescaled to the system base.
  static LinearParams from_plant(const PlantParams& plant, const ControlGains& gains, double k_omega,
                                 double k_beta);
};

/// T dx/dt = A x + E dP_L with x = (rho_1, rho_2, omega_g, omega_r, v_dc, P_g).
struct SmallSignalModel {
  Mat6 t = Mat6::Zero();
  Mat6 a = Mat6::Zero();
  Vec6 e = Vec6::Zero();
  std::array<std::string, 6> labels;
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d kd_prime = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d k_theta = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d k_wt = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d j = Eigen::Matrix2d::Zero();
  LinearParams params;

  /// T^-1 A
  Mat6 system_matrix() const;
};

SmallSignalModel build_model(const LinearParams& p);

struct StabilityVerdict {
  Eigen::VectorXcd spectrum;
  double max_real = 0.0;
  bool stable = false;
};

/// Eigenvalues of T^-1 A; stable iff max Re < -1e-9.
StabilityVerdict stability_verdict(const SmallSignalModel& model);

/// K_omega + K_beta K_p >= 0 and equal K_d/K_theta ratios (1e-9 relative).
bool theorem1_conditions(double k_theta_gsc, double k_d_gsc, double k_theta_msc, double k_d_msc, double k_omega,
                         double k_beta, double k_p);
bool theorem1_conditions(const LinearParams& p);

struct LaSalleReport {
  Mat6 m = Mat6::Zero();
  Mat6 v = Mat6::Zero();
  Mat6 s = Mat6::Zero();  // M A~ + A~^T M in x = (B rho, omega, v_dc, P_g)
  double min_eig_m = 0.0;
  double min_eig_v = 0.0;
  double max_eig_s = 0.0;
  double max_deviation = 0.0;  // max |S + V| elementwise
  bool passed = false;         // M > 0 and max eig S <= 1e-9
};

LaSalleReport lasalle_verify(const SmallSignalModel& model);

/// x' V x with V = x' M x; evaluated in z-coordinates.
double lasalle_value(const LaSalleReport& rep, const SmallSignalModel& model, const Vec6& z);

struct LinearTrace {
  std::vector<double> t;
  std::vector<Vec6> x;
};

/// RK4 of T x' = A x + E dP_L from rest.
LinearTrace linear_response(const SmallSignalModel& model, double delta_load, double horizon, double dt);

/// x_inf with A x = -E dP_L.
Vec6 linear_steady_state(const SmallSignalModel& model, double delta_load);

/// Nonlinear counterpart of the linear model: T_dc = 0, constant |V|,
/// algebraic pitch beta = beta_del + K_p (omega_r - omega_del), line flows
/// b sin(.) about a zero angle-difference operating point.
class ReducedLoop {
 public:
  ReducedLoop(PlantParams plant, ControlGains gains);
  Vec6 derivative(const Vec6& z) const;
  /// Zero state is the equilibrium.
  Vec6 equilibrium() const;
  /// Central differences with one Richardson extrapolation.
  Mat6 jacobian(const Vec6& z, double h = 1e-5) const;

 private:
  PlantParams plant_;
  ControlGains gains_;
  double p_wt_del_ = 0.0;
};

}  // namespace wtgfm
