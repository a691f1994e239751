#include "wtgfm/curtailment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "wtgfm/errors.hpp"

namespace wtgfm {

namespace {

constexpr double kResidualTol = 1e-9;
constexpr int kMaxBisection = 200;

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw DomainError(std::string(name) + " grid is empty");
  for (std::size_t k = 1; k < g.size(); ++k) {
    if (!(g[k] > g[k - 1])) throw DomainError(std::string(name) + " grid must be strictly increasing");
  }
}

// Root of a non-increasing f on [lo, hi] with f(lo) >= 0 >= f(hi).
template <class F>
double bisect_decreasing(F&& f, double lo, double hi) {
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) < 1e-13 || hi - lo < 1e-15) return mid;
    if (fm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::size_t bracket(const std::vector<double>& axis, double x) {
  if (axis.size() == 1) return 0;
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(axis.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, axis.size() - 2);
}

}  // namespace

double solve_speed_deload_target(const CpSurface& surface, const MaxPowerPoint& mpp, double target_cp) {
  if (target_cp >= mpp.cp) return mpp.lambda;
  const double lo = mpp.lambda;
  const double hi = surface.lambda_max();
  auto f = [&](double l) { return cp(surface, l, 0.0) - target_cp; };
  if (f(hi) > 0.0) {
    throw NoSolutionError("curtailment target unreachable by overspeed: Cp(lambda_max, 0) exceeds target");
  }
  constexpr int kChecks = 400;
  double prev = cp(surface, lo, 0.0);
  for (int k = 1; k <= kChecks; ++k) {
    const double v = cp(surface, lo + (hi - lo) * k / kChecks, 0.0);
    if (v > prev + 1e-12) throw DomainError("Cp(., 0) is not decreasing beyond lambda_mpp");
    prev = v;
  }
  const double l = bisect_decreasing(f, lo, hi);
  if (std::abs(f(l)) >= kResidualTol) throw ConvergenceError("speed deload bisection residual too large");
  return l;
}

double solve_speed_deload(const CpSurface& surface, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  const auto mpp = find_mpp(surface);
  if (eta == 1.0) return mpp.lambda;
  return solve_speed_deload_target(surface, mpp, eta * mpp.cp);
}

double solve_pitch_deload(const CpSurface& surface, double lambda_capped, double eta, double target_cp) {
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  const double target = eta * target_cp;
  auto f = [&](double b) { return cp(surface, lambda_capped, b) - target; };
  if (f(0.0) <= 0.0) return 0.0;
  const double hi = std::min(30.0, surface.beta_max());
  if (f(hi) > 0.0) throw NoSolutionError("curtailment target unreachable even at maximum pitch");
  const double b = bisect_decreasing(f, 0.0, hi);
  if (std::abs(f(b)) >= kResidualTol) {
    throw DomainError("Cp(lambda_capped, .) is not decreasing in pitch; no unique deload angle");
  }
  return b;
}

double mpp_rotor_speed_pu(const TurbineParams& params, const MaxPowerPoint& mpp, double v_w) {
  return std::min(mpp.lambda * v_w / (params.rotor_radius * params.omega_nom), params.omega_max_pu);
}

DeloadPoint deload_point(const TurbineParams& params, const CpSurface& surface, const MaxPowerPoint& mpp,
                         double v_w, double eta) {
  if (!(v_w >= params.v_cut_in && v_w <= params.v_cut_out)) {
    throw DomainError("wind speed outside [v_cut_in, v_cut_out]");
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
  const double reference_cp = std::min(mpp.cp, rated_cp(params, v_w));
  DeloadPoint p;
  p.v_w = v_w;
  p.eta = eta;
  p.target_cp = eta * reference_cp;
  const double lambda_capped = params.rotor_radius * params.omega_max_pu * params.omega_nom / v_w;
  if (lambda_capped < surface.lambda_max() && cp(surface, lambda_capped, 0.0) > p.target_cp) {
    // overspeed alone cannot reach the target before omega_max; the speed
    // solution may then lie beyond the surface domain
    try {
      p.lambda_del = solve_speed_deload_target(surface, mpp, p.target_cp);
    } catch (const NoSolutionError&) {
      p.lambda_del = surface.lambda_max();
    }
  } else {
    p.lambda_del = solve_speed_deload_target(surface, mpp, p.target_cp);
  }
  const double omega_pu = p.lambda_del * v_w / (params.rotor_radius * params.omega_nom);
  if (omega_pu <= params.omega_max_pu) {
    p.omega_del_pu = omega_pu;
    p.beta_del_deg = 0.0;
  } else {
    p.omega_del_pu = params.omega_max_pu;
    p.beta_del_deg = solve_pitch_deload(surface, lambda_capped, eta, reference_cp);
  }
  return p;
}

DeloadPoint deload_point(const TurbineParams& params, const CpSurface& surface, double v_w, double eta) {
  return deload_point(params, surface, find_mpp(surface), v_w, eta);
}

double deload_power_pu(const TurbineParams& params, const CpSurface& surface, const DeloadPoint& point) {
  return wind_power_pu(params, surface, point.v_w, point.omega_del_pu, point.beta_del_deg);
}

DeloadTable::DeloadTable(std::vector<double> v_grid, std::vector<double> eta_grid, std::vector<DeloadPoint> cells)
    : v_grid_(std::move(v_grid)), eta_grid_(std::move(eta_grid)), cells_(std::move(cells)) {
  check_grid(v_grid_, "wind");
  check_grid(eta_grid_, "eta");
  if (cells_.size() != v_grid_.size() * eta_grid_.size()) throw DomainError("deload table cell count mismatch");
}

const DeloadPoint& DeloadTable::at(std::size_t i_wind, std::size_t i_eta) const {
  return cells_.at(i_wind * eta_grid_.size() + i_eta);
}

DeloadPoint DeloadTable::lookup(double v_w, double eta) const {
  if (v_w < v_grid_.front() || v_w > v_grid_.back() || eta < eta_grid_.front() || eta > eta_grid_.back()) {
    throw DomainError("deload table lookup would extrapolate");
  }
  const std::size_t i = bracket(v_grid_, v_w);
  const std::size_t j = bracket(eta_grid_, eta);
  const std::size_t i1 = std::min(i + 1, v_grid_.size() - 1);
  const std::size_t j1 = std::min(j + 1, eta_grid_.size() - 1);
  const double u = i1 == i ? 0.0 : (v_w - v_grid_[i]) / (v_grid_[i1] - v_grid_[i]);
  const double w = j1 == j ? 0.0 : (eta - eta_grid_[j]) / (eta_grid_[j1] - eta_grid_[j]);
  auto blend = [&](auto field) {
    return (1 - u) * (1 - w) * field(at(i, j)) + (1 - u) * w * field(at(i, j1)) + u * (1 - w) * field(at(i1, j)) +
           u * w * field(at(i1, j1));
  };
  DeloadPoint p;
  p.v_w = v_w;
  p.eta = eta;
  p.lambda_del = blend([](const DeloadPoint& c) { return c.lambda_del; });
  p.omega_del_pu = blend([](const DeloadPoint& c) { return c.omega_del_pu; });
  p.beta_del_deg = blend([](const DeloadPoint& c) { return c.beta_del_deg; });
  p.target_cp = blend([](const DeloadPoint& c) { return c.target_cp; });
  return p;
}

std::vector<double> default_wind_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 20; ++k) g.push_back(4.0 + 0.5 * k);
  return g;
}

std::vector<double> default_eta_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 6; ++k) g.push_back(0.70 + 0.05 * k);
  g.back() = 1.0;
  return g;
}

DeloadTable build_table_serial(const TurbineParams& params, const CpSurface& surface,
                               const std::vector<double>& v_grid, const std::vector<double>& eta_grid) {
  check_grid(v_grid, "wind");
  check_grid(eta_grid, "eta");
  const auto mpp = find_mpp(surface);
  std::vector<DeloadPoint> cells(v_grid.size() * eta_grid.size());
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    for (std::size_t j = 0; j < eta_grid.size(); ++j) {
      cells[i * eta_grid.size() + j] = deload_point(params, surface, mpp, v_grid[i], eta_grid[j]);
    }
  }
  return DeloadTable(v_grid, eta_grid, std::move(cells));
}

DeloadTable build_table(const TurbineParams& params, const CpSurface& surface, const std::vector<double>& v_grid,
                        const std::vector<double>& eta_grid) {
  check_grid(v_grid, "wind");
  check_grid(eta_grid, "eta");
  const auto mpp = find_mpp(surface);
  const long n_eta = static_cast<long>(eta_grid.size());
  const long n = static_cast<long>(v_grid.size()) * n_eta;
  std::vector<DeloadPoint> cells(static_cast<std::size_t>(n));
  // Exceptions must not cross the OpenMP region boundary.
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    try {
      cells[k] = deload_point(params, surface, mpp, v_grid[k / n_eta], eta_grid[k % n_eta]);
    } catch (const std::exception& e) {
#pragma omp critical(wtgfm_table_failure)
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NoSolutionError(failure);
  return DeloadTable(v_grid, eta_grid, std::move(cells));
}

void write_deload_csv(std::ostream& out, const DeloadTable& table) {
  out << "v_w,eta,lambda_del,omega_del_pu,beta_del_deg\n" << std::setprecision(17);
  for (const auto& c : table.cells()) {
    out << c.v_w << ',' << c.eta << ',' << c.lambda_del << ',' << c.omega_del_pu << ',' << c.beta_del_deg << '\n';
  }
}

DeloadTable read_deload_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "v_w,eta,lambda_del,omega_del_pu,beta_del_deg") {
    throw DomainError("deload CSV header mismatch");
  }
  std::vector<DeloadPoint> cells;
  std::vector<double> v_grid;
  std::vector<double> eta_grid;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    double f[5];
    for (double& x : f) {
      if (!std::getline(ss, cell, ',')) throw DomainError("deload CSV row needs 5 columns");
      x = std::stod(cell);
    }
    DeloadPoint p;
    p.v_w = f[0];
    p.eta = f[1];
    p.lambda_del = f[2];
    p.omega_del_pu = f[3];
    p.beta_del_deg = f[4];
    if (v_grid.empty() || v_grid.back() != p.v_w) v_grid.push_back(p.v_w);
    if (v_grid.size() == 1) eta_grid.push_back(p.eta);
    cells.push_back(p);
  }
  return DeloadTable(std::move(v_grid), std::move(eta_grid), std::move(cells));
}

}  // namespace wtgfm
