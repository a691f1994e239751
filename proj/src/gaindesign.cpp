#include "wtgfm/gaindesign.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "wtgfm/errors.hpp"

namespace wtgfm {

DesignSpec DesignSpec::table3() { return {}; }

DesignSpec DesignSpec::fig7() {
  DesignSpec s;
  s.d_omega_max = 0.005;
  return s;
}

DesignSpec DesignSpec::preset(const std::string& name) {
  if (name == "table3") return table3();
  if (name == "fig7") return fig7();
  throw ConfigError("unknown design preset '" + name + "' (expected table3 or fig7)");
}

void DesignSpec::validate() const {
  if (!(d_omega_max > 0.0 && d_vdc_max > 0.0)) throw ConfigError("excursion limits must be > 0");
  if (!(k_theta_msc_floor >= 0.0)) throw ConfigError("K_theta^msc floor must be >= 0");
  if (target_mp && !(*target_mp > 0.0)) throw ConfigError("target droop must be > 0");
}

double droop_coefficient(double k_theta_gsc, double k_theta_msc, double k_omega, double k_beta, double k_p) {
  const double stiffness = k_theta_msc * (k_omega + k_beta * k_p);
  if (!(stiffness > 0.0)) throw DomainError("zero stiffness: no droop response");
  return k_theta_gsc / stiffness;
}

double max_gsc_gain(const DesignSpec& spec) {
  spec.validate();
  return spec.d_omega_max / spec.d_vdc_max;
}

double max_msc_gain(const DesignSpec& spec, double k_theta_gsc, double omega_del, double omega_mpp) {
  spec.validate();
  const double headroom = omega_del - omega_mpp;
  if (headroom <= 0.0) return spec.k_theta_msc_floor;
  return k_theta_gsc * headroom / spec.d_omega_max;
}

double max_pitch_gain(const DesignSpec& spec, double k_theta_gsc, double k_theta_msc, double beta_del_deg) {
  spec.validate();
  if (!(k_theta_msc > 0.0)) throw DomainError("K_theta^msc must be > 0");
  if (beta_del_deg <= 0.0) return 0.0;
  return (k_theta_gsc / k_theta_msc) * beta_del_deg / spec.d_omega_max;
}

namespace {

GainDesign design_with(const TurbineParams& params, const CpSurface& surface, const MaxPowerPoint& mpp, double v_w,
                       double eta, const DesignSpec& spec, const ControlGains& base) {
  GainDesign d;
  d.mpp = mpp;
  d.point = deload_point(params, surface, mpp, v_w, eta);
  d.omega_mpp = mpp_rotor_speed_pu(params, mpp, v_w);
  d.sens = power_sensitivities(params, surface, v_w, d.point.omega_del_pu, d.point.beta_del_deg);

  ControlGains g = base;
  g.gsc.k_theta = max_gsc_gain(spec);
  g.omega_del = d.point.omega_del_pu;
  g.pitch.beta_del_deg = d.point.beta_del_deg;
  g.pitch.omega_max_pu = params.omega_max_pu;

  if (eta >= 1.0) {
    g.msc.k_theta = kMpptMscGain;
    g.pitch.k_p = 0.0;
  } else {
    g.msc.k_theta = max_msc_gain(spec, g.gsc.k_theta, d.point.omega_del_pu, d.omega_mpp);
    d.floor_applied = d.point.omega_del_pu - d.omega_mpp <= 0.0;
    g.pitch.k_p = max_pitch_gain(spec, g.gsc.k_theta, g.msc.k_theta, d.point.beta_del_deg);
  }
  g.msc.k_d = g.gsc.k_d * g.msc.k_theta / g.gsc.k_theta;
  d.gains = g;

  const double stiffness = g.msc.k_theta * (d.sens.k_omega + d.sens.k_beta * g.pitch.k_p);
  d.has_droop = eta < 1.0 && stiffness > 0.0;
  d.m_p = d.has_droop ? droop_coefficient(g.gsc.k_theta, g.msc.k_theta, d.sens.k_omega, d.sens.k_beta, g.pitch.k_p)
                      : std::numeric_limits<double>::quiet_NaN();
  if (spec.target_mp) d.target_met = d.has_droop && d.m_p <= *spec.target_mp;
  return d;
}

}  // namespace

GainDesign design_gains(const TurbineParams& params, const CpSurface& surface, double v_w, double eta,
                        const DesignSpec& spec, const ControlGains& base) {
  spec.validate();
  return design_with(params, surface, find_mpp(surface), v_w, eta, spec, base);
}

std::string to_string(DroopStatus s) {
  switch (s) {
    case DroopStatus::Ok:
      return "ok";
    case DroopStatus::NoDroop:
      return "no_droop";
    case DroopStatus::TargetMissed:
      return "target_missed";
    case DroopStatus::Infeasible:
      return "infeasible";
  }
  return "?";
}

DroopCell droop_cell(const TurbineParams& params, const CpSurface& surface, const MaxPowerPoint& mpp, double v_w,
                     double eta, const DesignSpec& spec) {
  DroopCell c;
  c.v_w = v_w;
  c.eta = eta;
  c.m_p = std::numeric_limits<double>::quiet_NaN();
  try {
    const auto d = design_with(params, surface, mpp, v_w, eta, spec, ControlGains{});
    if (!d.has_droop) {
      c.status = DroopStatus::NoDroop;
    } else {
      c.m_p = d.m_p;
      c.status = d.target_met ? DroopStatus::Ok : DroopStatus::TargetMissed;
    }
  } catch (const Error&) {
    c.status = DroopStatus::Infeasible;
  }
  return c;
}

DroopMap droop_map_serial(const TurbineParams& params, const CpSurface& surface, const std::vector<double>& v_grid,
                          const std::vector<double>& eta_grid, const DesignSpec& spec) {
  spec.validate();
  const auto mpp = find_mpp(surface);
  DroopMap m{v_grid, eta_grid, {}};
  m.cells.resize(v_grid.size() * eta_grid.size());
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    for (std::size_t j = 0; j < eta_grid.size(); ++j) {
      m.cells[i * eta_grid.size() + j] = droop_cell(params, surface, mpp, v_grid[i], eta_grid[j], spec);
    }
  }
  return m;
}

DroopMap droop_map(const TurbineParams& params, const CpSurface& surface, const std::vector<double>& v_grid,
                   const std::vector<double>& eta_grid, const DesignSpec& spec) {
  spec.validate();
  const auto mpp = find_mpp(surface);
  DroopMap m{v_grid, eta_grid, {}};
  const long n_eta = static_cast<long>(eta_grid.size());
  const long n = static_cast<long>(v_grid.size()) * n_eta;
  m.cells.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    m.cells[k] = droop_cell(params, surface, mpp, v_grid[k / n_eta], eta_grid[k % n_eta], spec);
  }
  return m;
}

void write_droop_csv(std::ostream& out, const DroopMap& map) {
  out << "v_w,eta,m_p,status\n" << std::setprecision(17);
  for (const auto& c : map.cells) {
    out << c.v_w << ',' << c.eta << ',';
    if (std::isnan(c.m_p)) {
      out << "nan";
    } else {
      out << c.m_p;
    }
    out << ',' << to_string(c.status) << '\n';
  }
}

}  // namespace wtgfm
