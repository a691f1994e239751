#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace wtgfm {

inline constexpr double kBetzLimit = 16.0 / 27.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Exponential power-coefficient family
///
///   Cp = cp_scale * [ c1 (c2 / li - c3 b - c4) exp(-c5 / li) + c6 l ]
///   1/li = 1 / (l + c7 b) - c8 / (b^3 + 1),   l = lambda_scale * lambda
///
/// with b the pitch angle in degrees. The textbook coefficient set is
/// (0.5176, 116, 0.4, 5, 21, 0.0068, 0.08, 0.035) with unit scales.
struct AnalyticCp {
  std::array<double, 8> c{0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068, 0.08, 0.035};
  double lambda_scale = 1.0;
  double cp_scale = 1.0;
};

/// Cp sampled on a (lambda, beta) grid, bilinearly interpolated.
/// `values` is row-major with lambda as the outer index.
struct TabulatedCp {
  std::vector<double> lambda;
  std::vector<double> beta_deg;
  std::vector<double> values;
};

class CpSurface {
 public:
  static CpSurface analytic(const AnalyticCp& coefficients);
  static CpSurface tabulated(TabulatedCp table);

  /// Textbook coefficients, lambda_mpp ~ 8.1, Cp_max ~ 0.48.
  static CpSurface standard();

  /// Raw Cp before clamping; no domain checks.
  double raw(double lambda, double beta_deg) const;

  bool is_tabulated() const { return std::holds_alternative<TabulatedCp>(data_); }
  const AnalyticCp* analytic_data() const { return std::get_if<AnalyticCp>(&data_); }
  const TabulatedCp* table_data() const { return std::get_if<TabulatedCp>(&data_); }

  /// Lambda interval used for searches (evaluation domain).
  double lambda_min() const;
  double lambda_max() const;
  double beta_min() const;
  double beta_max() const;

 private:
  explicit CpSurface(std::variant<AnalyticCp, TabulatedCp> data) : data_(std::move(data)) {}
  std::variant<AnalyticCp, TabulatedCp> data_;
};

/// Power coefficient clamped to [0, 16/27].
/// Throws DomainError for lambda <= 0, beta < 0, or (tabulated) outside
/// the table range.
double cp(const CpSurface& surface, double lambda, double beta_deg);

struct TurbineParams {
  double air_density = 1.225;      // kg/m^3
  double rotor_radius = 63.0;      // m
  double inertia = 35.328e6;       // kg m^2, rotor + blades + generator
  double omega_nom = 1.37;         // rad/s, rotor speed base
  double omega_max_pu = 1.2;       // pu of omega_nom
  double rated_power = 5.0e6;      // W per turbine
  double rated_wind = 11.23;       // m/s
  double n_agg = 10.0;             // identical turbines lumped into one
  double v_cut_in = 3.0;           // m/s
  double v_cut_out = 25.0;         // m/s

  void validate() const;
  /// 0.5 rho pi R^2
  double swept_factor() const;
};

double tip_speed_ratio(double radius, double omega_r, double v_w);

/// Aggregated mechanical power in W; omega_r in rad/s.
double wind_power(const TurbineParams& params, const CpSurface& surface, double v_w,
                  double omega_r, double beta_deg);

/// Same, in pu of the aggregated rating, with omega_r in pu of omega_nom.
double wind_power_pu(const TurbineParams& params, const CpSurface& surface, double v_w,
                     double omega_r_pu, double beta_deg);

/// Cp that delivers exactly rated power at wind speed v_w.
double rated_cp(const TurbineParams& params, double v_w);

struct MaxPowerPoint {
  double lambda = 0.0;
  double cp = 0.0;
};

/// Maximizer of Cp(., 0) on the surface's lambda domain.
/// Throws DomainError if Cp(., 0) is flat to 1e-9.
MaxPowerPoint find_mpp(const CpSurface& surface);

struct PowerSensitivities {
  double k_omega = 0.0;      // pu power per pu speed, reported
  double k_beta = 0.0;       // pu power per degree
  double k_omega_raw = 0.0;  // before near-zero clamping
};

/// -dP/domega_r and -dP/dbeta at (omega_del, beta_del) by central differences
/// (1e-4 pu and 1e-3 deg). k_omega is zeroed when |k| < 1e-4 and when it is
/// negative but above -1e-3.
PowerSensitivities power_sensitivities(const TurbineParams& params, const CpSurface& surface,
                                       double v_w, double omega_del_pu, double beta_del_deg);

/// Tip-speed ratio at which the rotor reaches omega_max exactly at rated wind.
double calibration_lambda_target(const TurbineParams& params);

/// Stretches lambda and rescales Cp so that the maximum sits at
/// calibration_lambda_target() and equals rated_cp(rated_wind).
CpSurface calibrate(const AnalyticCp& shape, const TurbineParams& params);

/// Shape coefficients of the default surface before calibration.
AnalyticCp default_shape();

/// calibrate(default_shape(), params)
CpSurface default_surface(const TurbineParams& params = {});

/// CSV with header `lambda,beta_deg,cp`, lambda-outer row-major grid,
/// strictly increasing axes.
CpSurface read_cp_table(std::istream& in);
CpSurface read_cp_table(const std::filesystem::path& path);
void write_cp_table(std::ostream& out, const TabulatedCp& table);

/// Samples any surface onto a grid (clamped values).
TabulatedCp sample_surface(const CpSurface& surface, const std::vector<double>& lambda,
                           const std::vector<double>& beta_deg);

}  // namespace wtgfm
