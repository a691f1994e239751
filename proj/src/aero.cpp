#include "wtgfm/aero.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "wtgfm/errors.hpp"

namespace wtgfm {

namespace {

constexpr double kAnalyticLambdaMin = 0.5;
constexpr double kAnalyticLambdaMax = 20.0;
constexpr double kAnalyticBetaMax = 30.0;

double analytic_raw(const AnalyticCp& a, double lambda, double beta) {
  const auto& c = a.c;
  const double l = a.lambda_scale * lambda;
  const double inv = 1.0 / (l + c[6] * beta) - c[7] / (beta * beta * beta + 1.0);
  const double value = c[0] * (c[1] * inv - c[2] * beta - c[3]) * std::exp(-c[4] * inv) + c[5] * l;
  return a.cp_scale * value;
}

// Index i with axis[i] <= x <= axis[i+1]; x must lie inside the axis.
std::size_t bracket(const std::vector<double>& axis, double x) {
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(axis.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, axis.size() - 2);
}

double tabulated_raw(const TabulatedCp& t, double lambda, double beta) {
  const std::size_t nb = t.beta_deg.size();
  const std::size_t i = bracket(t.lambda, lambda);
  const std::size_t j = bracket(t.beta_deg, beta);
  const double u = (lambda - t.lambda[i]) / (t.lambda[i + 1] - t.lambda[i]);
  const double w = (beta - t.beta_deg[j]) / (t.beta_deg[j + 1] - t.beta_deg[j]);
  const double v00 = t.values[i * nb + j];
  const double v01 = t.values[i * nb + j + 1];
  const double v10 = t.values[(i + 1) * nb + j];
  const double v11 = t.values[(i + 1) * nb + j + 1];
  return (1 - u) * (1 - w) * v00 + (1 - u) * w * v01 + u * (1 - w) * v10 + u * w * v11;
}

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) throw DomainError(std::string("Cp table axis '") + name + "' needs at least 2 points");
  for (std::size_t k = 1; k < axis.size(); ++k) {
    if (!(axis[k] > axis[k - 1])) {
      throw DomainError(std::string("Cp table axis '") + name + "' must be strictly increasing");
    }
  }
}

// Golden-section maximization of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

MaxPowerPoint maximize_on(const std::function<double(double)>& f, double lo, double hi) {
  const int n = static_cast<int>(std::ceil((hi - lo) / 1e-2));
  const double step = (hi - lo) / n;
  int best = 0;
  double fbest = -std::numeric_limits<double>::infinity();
  double fmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double v = f(lo + k * step);
    if (v > fbest) {
      fbest = v;
      best = k;
    }
    fmin = std::min(fmin, v);
  }
  if (fbest - fmin < 1e-9) throw DomainError("Cp(lambda, 0) is flat; maximum is not distinct");
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(n, best + 1) * step;
  const double x = golden_max(f, a, b, 1e-11);
  return {x, f(x)};
}

}  // namespace

CpSurface CpSurface::analytic(const AnalyticCp& coefficients) {
  if (!(coefficients.lambda_scale > 0.0) || !(coefficients.cp_scale > 0.0)) {
    throw DomainError("analytic Cp scales must be positive");
  }
  return CpSurface(coefficients);
}

CpSurface CpSurface::tabulated(TabulatedCp table) {
  check_axis(table.lambda, "lambda");
  check_axis(table.beta_deg, "beta_deg");
  if (table.values.size() != table.lambda.size() * table.beta_deg.size()) {
    throw DomainError("Cp table value count does not match the grid");
  }
  if (table.lambda.front() <= 0.0 || table.beta_deg.front() < 0.0) {
    throw DomainError("Cp table must have lambda > 0 and beta >= 0");
  }
  return CpSurface(std::move(table));
}

CpSurface CpSurface::standard() { return analytic(AnalyticCp{}); }

double CpSurface::raw(double lambda, double beta_deg) const {
  if (const auto* a = analytic_data()) return analytic_raw(*a, lambda, beta_deg);
  return tabulated_raw(*table_data(), lambda, beta_deg);
}

double CpSurface::lambda_min() const {
  return is_tabulated() ? table_data()->lambda.front() : kAnalyticLambdaMin;
}
double CpSurface::lambda_max() const {
  return is_tabulated() ? table_data()->lambda.back() : kAnalyticLambdaMax;
}
double CpSurface::beta_min() const { return is_tabulated() ? table_data()->beta_deg.front() : 0.0; }
double CpSurface::beta_max() const {
  return is_tabulated() ? table_data()->beta_deg.back() : kAnalyticBetaMax;
}

double cp(const CpSurface& surface, double lambda, double beta_deg) {
  if (!(lambda > 0.0)) throw DomainError("Cp requires lambda > 0");
  if (!(beta_deg >= 0.0)) throw DomainError("Cp requires beta >= 0");
  if (const auto* t = surface.table_data()) {
    if (lambda < t->lambda.front() || lambda > t->lambda.back() || beta_deg < t->beta_deg.front() ||
        beta_deg > t->beta_deg.back()) {
      throw DomainError("Cp query outside the tabulated range");
    }
  }
  return std::clamp(surface.raw(lambda, beta_deg), 0.0, kBetzLimit);
}

void TurbineParams::validate() const {
  const double fields[] = {air_density, rotor_radius, inertia,   omega_nom, omega_max_pu,
                           rated_power, rated_wind,   n_agg,     v_cut_in,  v_cut_out};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("turbine parameters must be positive and finite");
  }
  if (!(v_cut_out > v_cut_in)) throw ConfigError("turbine cut-out wind must exceed cut-in");
}

double TurbineParams::swept_factor() const { return 0.5 * air_density * kPi * rotor_radius * rotor_radius; }

double tip_speed_ratio(double radius, double omega_r, double v_w) {
  if (!(v_w > 0.0)) throw DomainError("tip speed ratio requires v_w > 0");
  return radius * omega_r / v_w;
}

double wind_power(const TurbineParams& params, const CpSurface& surface, double v_w, double omega_r,
                  double beta_deg) {
  if (!(v_w > 0.0) || !(omega_r > 0.0)) throw DomainError("wind power requires v_w > 0 and omega_r > 0");
  const double lambda = tip_speed_ratio(params.rotor_radius, omega_r, v_w);
  return params.n_agg * params.swept_factor() * cp(surface, lambda, beta_deg) * v_w * v_w * v_w;
}

double wind_power_pu(const TurbineParams& params, const CpSurface& surface, double v_w, double omega_r_pu,
                     double beta_deg) {
  return wind_power(params, surface, v_w, omega_r_pu * params.omega_nom, beta_deg) /
         (params.n_agg * params.rated_power);
}

double rated_cp(const TurbineParams& params, double v_w) {
  return params.rated_power / (params.swept_factor() * v_w * v_w * v_w);
}

MaxPowerPoint find_mpp(const CpSurface& surface) {
  return maximize_on([&](double l) { return cp(surface, l, 0.0); }, surface.lambda_min(), surface.lambda_max());
}

PowerSensitivities power_sensitivities(const TurbineParams& params, const CpSurface& surface, double v_w,
                                       double omega_del_pu, double beta_del_deg) {
  constexpr double h_omega = 1e-4;
  constexpr double h_beta = 1e-3;
  auto p = [&](double w, double b) { return wind_power_pu(params, surface, v_w, w, b); };
  PowerSensitivities s;
  s.k_omega_raw = -(p(omega_del_pu + h_omega, beta_del_deg) - p(omega_del_pu - h_omega, beta_del_deg)) /
                  (2.0 * h_omega);
  // One-sided at the lower pitch bound.
  if (beta_del_deg - h_beta < 0.0) {
    s.k_beta = -(p(omega_del_pu, beta_del_deg + h_beta) - p(omega_del_pu, beta_del_deg)) / h_beta;
  } else {
    s.k_beta = -(p(omega_del_pu, beta_del_deg + h_beta) - p(omega_del_pu, beta_del_deg - h_beta)) /
               (2.0 * h_beta);
  }
  s.k_omega = s.k_omega_raw;
  if (std::abs(s.k_omega) < 1e-4 || (s.k_omega < 0.0 && s.k_omega > -1e-3)) s.k_omega = 0.0;
  return s;
}

double calibration_lambda_target(const TurbineParams& params) {
  return params.omega_max_pu * params.omega_nom * params.rotor_radius / params.rated_wind;
}

CpSurface calibrate(const AnalyticCp& shape, const TurbineParams& params) {
  params.validate();
  AnalyticCp unit = shape;
  unit.lambda_scale = 1.0;
  unit.cp_scale = 1.0;
  const auto peak = maximize_on([&](double l) { return analytic_raw(unit, l, 0.0); }, 2.0, 15.0);
  AnalyticCp out = unit;
  out.lambda_scale = peak.lambda / calibration_lambda_target(params);
  out.cp_scale = rated_cp(params, params.rated_wind) / peak.cp;
  return CpSurface::analytic(out);
}

AnalyticCp default_shape() {
  AnalyticCp a;
  a.c = {0.06055268107518582, 43.76645267993559,  0.63339459618441,   9.032778342338332,
         6.389220637480764,   0.02853645483927226, 0.03277551907498467, 0.027847982576239296};
  return a;
}

CpSurface default_surface(const TurbineParams& params) { return calibrate(default_shape(), params); }

CpSurface read_cp_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty Cp table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "lambda,beta_deg,cp") throw DomainError("Cp table header must be 'lambda,beta_deg,cp'");
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 3> r{};
    std::istringstream ss(line);
    std::string cell;
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, cell, ',')) throw DomainError("Cp table row needs 3 columns: " + line);
      try {
        r[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw DomainError("Cp table cell is not a number: " + cell);
      }
    }
    rows.push_back(r);
  }
  TabulatedCp t;
  for (const auto& r : rows) {
    if (t.lambda.empty() || r[0] != t.lambda.back()) t.lambda.push_back(r[0]);
  }
  if (t.lambda.empty() || rows.size() % t.lambda.size() != 0) throw DomainError("Cp table is not a full grid");
  const std::size_t nb = rows.size() / t.lambda.size();
  for (std::size_t j = 0; j < nb; ++j) t.beta_deg.push_back(rows[j][1]);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k][0] != t.lambda[k / nb] || rows[k][1] != t.beta_deg[k % nb]) {
      throw DomainError("Cp table rows must form a lambda-outer grid");
    }
    t.values.push_back(rows[k][2]);
  }
  return CpSurface::tabulated(std::move(t));
}

CpSurface read_cp_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Cp table " + path.string());
  return read_cp_table(in);
}

void write_cp_table(std::ostream& out, const TabulatedCp& table) {
  out << "lambda,beta_deg,cp\n" << std::setprecision(17);
  const std::size_t nb = table.beta_deg.size();
  for (std::size_t i = 0; i < table.lambda.size(); ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      out << table.lambda[i] << ',' << table.beta_deg[j] << ',' << table.values[i * nb + j] << '\n';
    }
  }
}

TabulatedCp sample_surface(const CpSurface& surface, const std::vector<double>& lambda,
                           const std::vector<double>& beta_deg) {
  TabulatedCp t{lambda, beta_deg, {}};
  t.values.reserve(lambda.size() * beta_deg.size());
  for (double l : lambda) {
    for (double b : beta_deg) t.values.push_back(cp(surface, l, b));
  }
  return t;
}

}  // namespace wtgfm
