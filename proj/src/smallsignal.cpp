#include "wtgfm/smallsignal.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "wtgfm/errors.hpp"

namespace wtgfm {

LinearParams LinearParams::from_plant(const PlantParams& plant, const ControlGains& gains, double k_omega,
                                      double k_beta) {
  LinearParams p;
  p.j_g = plant.j_g();
  p.j_wt = plant.j_wt();
  p.c_dc = plant.c_dc();
  p.t_g = plant.sg.t_g;
  p.k_g = plant.k_g();
  p.b_g = plant.network.b_g * plant.network.omega_base();
  p.b_msc = plant.network.b_msc * plant.network.omega_machine_base();
  p.omega_0 = gains.omega_0;
  p.omega_del = gains.omega_del;
  p.k_theta_gsc = gains.gsc.k_theta;
  p.k_d_gsc = gains.gsc.k_d;
  p.k_theta_msc = gains.msc.k_theta;
  p.k_d_msc = gains.msc.k_d;
  p.k_omega = plant.wt_scale() * k_omega;
  p.k_beta = plant.wt_scale() * k_beta;
  p.k_p = gains.pitch.k_p;
  p.tdc_zero = gains.gsc.t_dc == 0.0 && gains.msc.t_dc == 0.0;
  return p;
}

Mat6 SmallSignalModel::system_matrix() const { return t.diagonal().cwiseInverse().asDiagonal() * a; }

SmallSignalModel build_model(const LinearParams& p) {
  for (double v : {p.j_g, p.j_wt, p.c_dc, p.t_g, p.k_g, p.b_g, p.b_msc, p.omega_0, p.omega_del, p.k_theta_gsc,
                   p.k_theta_msc}) {
    if (!(v > 0.0)) throw DomainError("small-signal parameters must be strictly positive");
  }
  if (p.k_d_gsc < 0.0 || p.k_d_msc < 0.0 || p.k_p < 0.0) throw DomainError("K_d and K_p must be >= 0");

  SmallSignalModel m;
  m.params = p;
  m.labels = {"rho_gsc", "rho_msc", "omega_g", "omega_r", "v_dc", "P_g"};
  m.b = Eigen::Vector2d(p.b_g, p.b_msc).asDiagonal();
  m.kd_prime = Eigen::Vector2d(p.k_d_gsc / p.c_dc, p.k_d_msc / p.c_dc).asDiagonal();
  m.k_theta = Eigen::Vector2d(p.k_theta_gsc, p.k_theta_msc).asDiagonal();
  m.k_wt = Eigen::Vector2d(0.0, p.k_omega + p.k_beta * p.k_p).asDiagonal();
  m.j = Eigen::Vector2d(p.j_g * p.omega_0, p.j_wt * p.omega_del).asDiagonal();

  const Eigen::Matrix2d ones = Eigen::Matrix2d::Ones();
  const Eigen::Vector2d one = Eigen::Vector2d::Ones();

  Vec6 tdiag;
  tdiag << 1.0, 1.0, m.j(0, 0), m.j(1, 1), p.c_dc, p.t_g;
  m.t = tdiag.asDiagonal();

  m.a.block<2, 2>(0, 0) = -m.kd_prime * ones * m.b;
  m.a.block<2, 2>(0, 2) = -Eigen::Matrix2d::Identity();
  m.a.block<2, 1>(0, 4) = m.k_theta * one;
  m.a.block<2, 2>(2, 0) = m.b;
  m.a.block<2, 2>(2, 2) = -m.k_wt;
  m.a(2, 5) = 1.0;
  m.a.block<1, 2>(4, 0) = -(one.transpose() * m.b);
  m.a(5, 2) = -p.k_g;
  m.a(5, 5) = -1.0;

  m.e(2) = -1.0;
  return m;
}

StabilityVerdict stability_verdict(const SmallSignalModel& model) {
  Eigen::EigenSolver<Mat6> es(model.system_matrix(), false);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed");
  StabilityVerdict v;
  v.spectrum = es.eigenvalues();
  v.max_real = v.spectrum.real().maxCoeff();
  v.stable = v.max_real < -1e-9;
  return v;
}

bool theorem1_conditions(double k_theta_gsc, double k_d_gsc, double k_theta_msc, double k_d_msc, double k_omega,
                         double k_beta, double k_p) {
  if (!(k_omega + k_beta * k_p >= 0.0)) return false;
  const double a = k_d_gsc / k_theta_gsc;
  const double b = k_d_msc / k_theta_msc;
  return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300});
}

bool theorem1_conditions(const LinearParams& p) {
  return theorem1_conditions(p.k_theta_gsc, p.k_d_gsc, p.k_theta_msc, p.k_d_msc, p.k_omega, p.k_beta, p.k_p);
}

namespace {

Vec6 coordinate_scale(const SmallSignalModel& model) {
  Vec6 d;
  d << model.b(0, 0), model.b(1, 1), 1.0, 1.0, 1.0, 1.0;
  return d;
}

}  // namespace

LaSalleReport lasalle_verify(const SmallSignalModel& model) {
  const auto& p = model.params;
  if (model.b.diagonal().minCoeff() <= 0.0) throw DomainError("susceptance matrix must be invertible");
  LaSalleReport r;

  Vec6 mdiag;
  mdiag << 1.0 / (p.k_theta_gsc * model.b(0, 0)), 1.0 / (p.k_theta_msc * model.b(1, 1)),
      model.j(0, 0) / p.k_theta_gsc, model.j(1, 1) / p.k_theta_msc, p.c_dc, p.t_g / (p.k_theta_gsc * p.k_g);
  r.m = (0.5 * mdiag).asDiagonal();

  r.v.block<2, 2>(0, 0) = (p.k_d_gsc / (p.k_theta_gsc * p.c_dc)) * Eigen::Matrix2d::Ones();
  r.v(3, 3) = model.k_wt(1, 1) / p.k_theta_msc;
  r.v(5, 5) = 1.0 / (p.k_theta_gsc * p.k_g);

  const Vec6 d = coordinate_scale(model);
  const Mat6 a_x = d.asDiagonal() * model.system_matrix() * d.cwiseInverse().asDiagonal();
  r.s = r.m * a_x + a_x.transpose() * r.m;
  r.s = 0.5 * (r.s + r.s.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Mat6> es_s(r.s, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Mat6> es_m(r.m, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Mat6> es_v(r.v, Eigen::EigenvaluesOnly);
  r.max_eig_s = es_s.eigenvalues().maxCoeff();
  r.min_eig_m = es_m.eigenvalues().minCoeff();
  r.min_eig_v = es_v.eigenvalues().minCoeff();
  r.max_deviation = (r.s + r.v).cwiseAbs().maxCoeff();
  r.passed = r.min_eig_m > 0.0 && r.max_eig_s <= 1e-9;
  return r;
}

double lasalle_value(const LaSalleReport& rep, const SmallSignalModel& model, const Vec6& z) {
  const Vec6 x = coordinate_scale(model).cwiseProduct(z);
  return x.dot(rep.m * x);
}

LinearTrace linear_response(const SmallSignalModel& model, double delta_load, double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw DomainError("linear_response needs dt > 0 and horizon >= 0");
  const Mat6 a = model.system_matrix();
  const Vec6 b = model.t.diagonal().cwiseInverse().cwiseProduct(model.e) * delta_load;
  auto f = [&](const Vec6& x) -> Vec6 { return a * x + b; };
  LinearTrace tr;
  Vec6 x = Vec6::Zero();
  const long n = std::lround(horizon / dt);
  tr.t.reserve(static_cast<std::size_t>(n + 1));
  tr.x.reserve(static_cast<std::size_t>(n + 1));
  tr.t.push_back(0.0);
  tr.x.push_back(x);
  for (long k = 1; k <= n; ++k) {
    x = rk4_step(f, x, dt);
    tr.t.push_back(static_cast<double>(k) * dt);
    tr.x.push_back(x);
  }
  return tr;
}

Vec6 linear_steady_state(const SmallSignalModel& model, double delta_load) {
  return model.a.fullPivLu().solve(Vec6(-model.e * delta_load));
}

ReducedLoop::ReducedLoop(PlantParams plant, ControlGains gains) : plant_(std::move(plant)), gains_(gains) {
  plant_.validate();
  p_wt_del_ = plant_.wind_power(gains_.omega_del, gains_.pitch.beta_del_deg);
}

Vec6 ReducedLoop::equilibrium() const { return Vec6::Zero(); }

Vec6 ReducedLoop::derivative(const Vec6& z) const {
  const auto& net = plant_.network;
  const double wb = net.omega_base();
  const double wbm = net.omega_machine_base();
  const double omega_g = 1.0 + z[2];
  const double omega_r = gains_.omega_del + z[3];
  const double v = 1.0 + z[4];

  // rho_1 = theta_gsc - theta_g, rho_2 = theta_msc - theta_r, in pu seconds
  const double p_gsc = net.b_g * std::sin(wb * z[0]);
  const double p_pmsg = -net.b_msc * std::sin(wbm * z[1]);
  const double dv = (p_pmsg - p_gsc) / (plant_.c_dc() * v);
  const double omega_gsc = gains_.omega_0 + gains_.gsc.k_theta * z[4] + gains_.gsc.k_d * dv;
  const double omega_msc = gains_.omega_del + gains_.msc.k_theta * z[4] + gains_.msc.k_d * dv;
  const double beta = gains_.pitch.beta_del_deg + gains_.pitch.k_p * z[3];
  const double p_wt = plant_.wind_power(omega_r, beta) - p_wt_del_;

  Vec6 d;
  d[0] = omega_gsc - omega_g;
  d[1] = omega_msc - omega_r;
  d[2] = (z[5] + p_gsc) / (plant_.j_g() * omega_g);
  d[3] = (p_wt - p_pmsg) / (plant_.j_wt() * omega_r);
  d[4] = dv;
  d[5] = (-z[5] - plant_.k_g() * z[2]) / plant_.sg.t_g;
  return d;
}

Mat6 ReducedLoop::jacobian(const Vec6& z, double h) const {
  Mat6 jac;
  for (int i = 0; i < 6; ++i) {
    auto central = [&](double step) {
      Vec6 zp = z;
      Vec6 zm = z;
      zp[i] += step;
      zm[i] -= step;
      return Vec6((derivative(zp) - derivative(zm)) / (2.0 * step));
    };
    jac.col(i) = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  }
  return jac;
}

}  // namespace wtgfm
