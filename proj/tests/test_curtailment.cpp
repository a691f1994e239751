#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "wtgfm/curtailment.hpp"
#include "wtgfm/errors.hpp"

using namespace wtgfm;

namespace {

const TurbineParams kP{};

const CpSurface& surf() {
  static const CpSurface s = default_surface(kP);
  return s;
}

const MaxPowerPoint& mpp() {
  static const MaxPowerPoint m = find_mpp(surf());
  return m;
}

double lambda_at(const DeloadPoint& d) { return d.omega_del_pu * kP.omega_nom * kP.rotor_radius / d.v_w; }

// eta * min(P_mpp, P_rated), from first principles
double target_power_pu(double v, double eta) {
  const double p_mpp = 0.5 * kP.air_density * kPi * kP.rotor_radius * kP.rotor_radius * mpp().cp * v * v * v /
                       kP.rated_power;
  return eta * std::min(p_mpp, 1.0);
}

}  // namespace

TEST(SpeedDeload, UnityReturnsMpp) { EXPECT_EQ(solve_speed_deload(surf(), 1.0), mpp().lambda); }

TEST(SpeedDeload, ResidualAndBranch) {
  const double l = solve_speed_deload(surf(), 0.9);
  EXPECT_GT(l, mpp().lambda);
  EXPECT_LT(std::abs(cp(surf(), l, 0.0) - 0.9 * mpp().cp), 1e-9);
}

TEST(SpeedDeload, MonotoneInEta) {
  double prev = 1e9;
  for (int k = 70; k <= 100; ++k) {
    const double eta = k / 100.0;
    const double l = solve_speed_deload(surf(), eta);
    EXPECT_LE(l, prev);
    prev = l;
  }
}

TEST(SpeedDeload, UnreachableTarget) {
  const double floor_cp = cp(surf(), surf().lambda_max(), 0.0);
  const double eta = 0.5 * floor_cp / mpp().cp;
  ASSERT_GT(eta, 0.0);
  EXPECT_THROW(solve_speed_deload(surf(), eta), NoSolutionError);
}

TEST(PitchDeload, AlreadyMet) {
  EXPECT_EQ(solve_pitch_deload(surf(), 14.0, 0.9, mpp().cp), 0.0);
  EXPECT_EQ(solve_pitch_deload(surf(), mpp().lambda, 0.9, mpp().cp / 0.9), 0.0);
}

TEST(PitchDeload, TwelveMetres) {
  const double lam = kP.omega_max_pu * kP.omega_nom * kP.rotor_radius / 12.0;
  const double ref = rated_cp(kP, 12.0);
  const double b = solve_pitch_deload(surf(), lam, 0.9, ref);
  EXPECT_NEAR(b, 5.4, 1.5);
  EXPECT_LT(std::abs(cp(surf(), lam, b) - 0.9 * ref), 1e-9);
}

TEST(PitchDeload, BeyondRange) {
  double lam = 1.0, best = 0.0;
  for (double l = 1.0; l < 20.0; l += 0.05) {
    if (cp(surf(), l, 30.0) > best) best = cp(surf(), l, 30.0), lam = l;
  }
  ASSERT_GT(best, 0.0);
  EXPECT_THROW(solve_pitch_deload(surf(), lam, 1.0, 0.5 * best), NoSolutionError);
}

TEST(DeloadPoint, EightMetres) {
  const auto d = deload_point(kP, surf(), 8.0, 0.9);
  EXPECT_NEAR(d.omega_del_pu, 1.16, 0.05 * 1.16);
  EXPECT_EQ(d.beta_del_deg, 0.0);
  EXPECT_GE(d.lambda_del, mpp().lambda);
}

TEST(DeloadPoint, TenMetresCapped) {
  const auto d = deload_point(kP, surf(), 10.0, 0.9);
  EXPECT_DOUBLE_EQ(d.omega_del_pu, kP.omega_max_pu);
  EXPECT_NEAR(d.beta_del_deg, 3.0, 1.5);
}

TEST(DeloadPoint, MppCaseLowWind) {
  const auto d = deload_point(kP, surf(), 6.0, 1.0);
  EXPECT_NEAR(d.omega_del_pu, mpp().lambda * 6.0 / (kP.rotor_radius * kP.omega_nom), 1e-12);
  EXPECT_EQ(d.beta_del_deg, 0.0);
}

TEST(DeloadPoint, OutsideOperatingRange) {
  EXPECT_THROW(deload_point(kP, surf(), 2.0, 0.9), DomainError);
  EXPECT_THROW(deload_point(kP, surf(), 26.0, 0.9), DomainError);
}

TEST(DeloadTable, FiveByFiveInvariants) {
  const std::vector<double> v{5.0, 7.5, 10.0, 12.5, 14.0};
  const std::vector<double> e{0.8, 0.85, 0.9, 0.95, 1.0};
  const auto t = build_table(kP, surf(), v, e);
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      const auto& d = t.at(i, j);
      const double lam = lambda_at(d);
      EXPECT_LE(d.omega_del_pu, kP.omega_max_pu + 1e-12);
      EXPECT_GE(d.beta_del_deg, 0.0);
      if (d.beta_del_deg > 0.0) EXPECT_DOUBLE_EQ(d.omega_del_pu, kP.omega_max_pu);
      EXPECT_LT(std::abs(cp(surf(), lam, d.beta_del_deg) - d.target_cp), 1e-9) << v[i] << " " << e[j];
      const double p = wind_power_pu(kP, surf(), v[i], d.omega_del_pu, d.beta_del_deg);
      EXPECT_NEAR(p, target_power_pu(v[i], e[j]), 0.005 * target_power_pu(v[i], e[j])) << v[i] << " " << e[j];
    }
  }
}

TEST(DeloadTable, ParallelMatchesSerial) {
  const auto v = default_wind_grid();
  const auto e = default_eta_grid();
  const auto a = build_table(kP, surf(), v, e);
  const auto b = build_table_serial(kP, surf(), v, e);
  ASSERT_EQ(a.cells().size(), b.cells().size());
  for (std::size_t k = 0; k < a.cells().size(); ++k) {
    EXPECT_EQ(a.cells()[k].omega_del_pu, b.cells()[k].omega_del_pu);
    EXPECT_EQ(a.cells()[k].beta_del_deg, b.cells()[k].beta_del_deg);
  }
}

TEST(DeloadTable, LookupNodeMidpointAndRange) {
  const auto t = build_table(kP, surf(), {8.0, 9.0, 10.0}, {0.8, 0.9, 1.0});
  const auto n = t.lookup(9.0, 0.9);
  EXPECT_DOUBLE_EQ(n.omega_del_pu, t.at(1, 1).omega_del_pu);
  EXPECT_DOUBLE_EQ(n.beta_del_deg, t.at(1, 1).beta_del_deg);
  const auto mid = t.lookup(9.5, 0.9);
  EXPECT_NEAR(mid.omega_del_pu, 0.5 * (t.at(1, 1).omega_del_pu + t.at(2, 1).omega_del_pu), 1e-14);
  EXPECT_NEAR(mid.beta_del_deg, 0.5 * (t.at(1, 1).beta_del_deg + t.at(2, 1).beta_del_deg), 1e-14);
  EXPECT_THROW(t.lookup(7.9, 0.9), DomainError);
  EXPECT_THROW(t.lookup(9.0, 1.01), DomainError);
}

TEST(DeloadTable, RejectsUnsortedGrid) {
  EXPECT_THROW(build_table(kP, surf(), {9.0, 8.0}, {0.9, 1.0}), DomainError);
}

TEST(DeloadTable, CsvRoundTrip) {
  const auto t = build_table(kP, surf(), {8.0, 12.0}, {0.9, 1.0});
  std::stringstream ss;
  write_deload_csv(ss, t);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "v_w,eta,lambda_del,omega_del_pu,beta_del_deg");
  const auto back = read_deload_csv(ss);
  ASSERT_EQ(back.cells().size(), t.cells().size());
  for (std::size_t k = 0; k < t.cells().size(); ++k) {
    EXPECT_EQ(back.cells()[k].omega_del_pu, t.cells()[k].omega_del_pu);
    EXPECT_EQ(back.cells()[k].beta_del_deg, t.cells()[k].beta_del_deg);
    EXPECT_EQ(back.cells()[k].lambda_del, t.cells()[k].lambda_del);
  }
}
