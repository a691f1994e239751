#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wtgfm/control.hpp"
#include "wtgfm/errors.hpp"
#include "wtgfm/gaindesign.hpp"

using namespace wtgfm;

namespace {

// explicit Euler on the filter state, small step
double settle_filter(double kt, double kd, double t, double u, double horizon, double h = 1e-6) {
  double x = 0.0;
  const long n = std::lround(horizon / h);
  for (long k = 0; k < n; ++k) x += h * pd_filter(kt, kd, t, x, u).dx;
  return pd_filter(kt, kd, t, x, u).y;
}

}  // namespace

TEST(PdFilter, DcGainAtConvergedState) {
  for (double u : {-0.02, 0.0, 0.013}) {
    const auto out = pd_filter(0.5, 0.0067, 0.005, u, u);
    EXPECT_NEAR(out.y, 0.5 * u, 1e-15);
    EXPECT_EQ(out.dx, 0.0);
  }
}

TEST(PdFilter, StepInitialAndFinalValue) {
  // H(inf) = K_d / T_dc, H(0) = K_theta
  const auto first = pd_filter(0.5, 0.0067, 0.05, 0.0, 1.0);
  EXPECT_NEAR(first.y, 0.134, 1e-12);
  EXPECT_NEAR(settle_filter(0.5, 0.0067, 0.05, 1.0, 1.5), 0.5, 1e-9);
}

TEST(PdFilter, ZeroDerivativeIsLag) {
  const double x = 0.3;
  EXPECT_NEAR(pd_filter(2.0, 0.0, 0.1, x, 1.0).y, 2.0 * x, 1e-15);
  // 63% after one time constant
  EXPECT_NEAR(settle_filter(2.0, 0.0, 0.1, 1.0, 0.1), 2.0 * (1.0 - std::exp(-1.0)), 1e-4);
}

TEST(PdFilter, RejectsNonPositiveTimeConstant) {
  EXPECT_THROW(pd_filter(0.5, 0.0, 0.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(pd_filter(0.5, 0.0, -1.0, 0.0, 1.0), DomainError);
}

TEST(Frequency, GscSetpointAndSteadyDroop) {
  ControlGains g;
  EXPECT_EQ(gsc_frequency(g, 0.0, g.v_dc_star), g.omega_0);
  EXPECT_NEAR(gsc_frequency(g, -0.01, 0.99) - g.omega_0, -0.005, 1e-15);
  EXPECT_LT(gsc_frequency(g, -0.002, 0.998), g.omega_0);
}

TEST(Frequency, MscSetpointAndSteadyDroop) {
  ControlGains g;
  g.omega_del = 1.16;
  g.msc.k_theta = 6.6;
  EXPECT_EQ(msc_frequency(g, 0.0, 1.0), 1.16);
  EXPECT_NEAR(msc_frequency(g, -0.005, 0.995) - 1.16, -0.033, 1e-12);
}

TEST(Frequency, MpptGainsEqual) {
  const TurbineParams p;
  const auto d = design_gains(p, default_surface(p), 8.0, 1.0, DesignSpec::table3());
  EXPECT_EQ(d.gains.msc.k_theta, 0.5);
  EXPECT_EQ(d.gains.gsc.k_theta, 0.5);
}

TEST(QvDroop, Steady) {
  ConverterGains g;
  EXPECT_EQ(qv_droop(g, g.q_star, g.q_star).y, g.v_star);
  EXPECT_NEAR(qv_droop(g, 0.1, 0.1).y, g.v_star - 0.002, 1e-15);
  EXPECT_EQ(qv_droop(g, 0.1, 0.1).dx, 0.0);
}

TEST(QvDroop, LagTimeConstant) {
  ConverterGains g;
  double q = 0.0;
  const double h = 1e-6;
  for (double t = 0.0; t < g.t_v - 0.5 * h; t += h) q += h * qv_droop(g, q, 1.0).dx;
  EXPECT_NEAR(q, 1.0 - std::exp(-1.0), 1e-4);
}

TEST(Pitch, InactiveLimitersGiveSetpoint) {
  PitchGains p;
  p.beta_del_deg = 3.0;
  p.k_p = 22.7;
  const auto c = pitch_reference(p, 1.1, 0.0, 0.0, 1.1, 0.8);
  EXPECT_EQ(c.beta_ref, 3.0);
  EXPECT_EQ(c.u_speed, 0.0);
  EXPECT_EQ(c.u_power, 0.0);
}

TEST(Pitch, ProportionalTerm) {
  PitchGains p;
  p.beta_del_deg = 3.0;
  p.k_p = 22.7;
  EXPECT_NEAR(pitch_reference(p, 1.1, 0.0, 0.0, 1.11, 0.8).beta_ref, 3.227, 1e-12);
}

TEST(Pitch, SpeedLimiterPushesUp) {
  PitchGains p;
  const auto c = pitch_reference(p, 1.1, 0.0, 0.0, p.omega_max_pu + 0.01, 0.8);
  EXPECT_GT(c.u_speed, 0.0);
  EXPECT_GT(c.dz_speed, 0.0);
  EXPECT_GT(c.beta_ref, 0.0);
}

TEST(Pitch, PowerLimiterPushesUp) {
  PitchGains p;
  const auto c = pitch_reference(p, 1.1, 0.0, 0.0, 1.0, p.p_max_msc + 0.05);
  EXPECT_GT(c.u_power, 0.0);
  EXPECT_GT(c.dz_power, 0.0);
}

TEST(Pitch, AntiWindupAtZero) {
  PitchGains p;
  const auto c = pitch_reference(p, 1.1, 0.0, 0.0, 1.0, 0.5);
  EXPECT_EQ(c.dz_speed, 0.0);
  EXPECT_EQ(c.dz_power, 0.0);
  // integrator above zero still unwinds
  EXPECT_LT(pitch_reference(p, 1.1, 0.2, 0.0, 1.0, 0.5).dz_speed, 0.0);
}

TEST(Pitch, AntiWindupAtUpperClamp) {
  PitchGains p;
  const auto c = pitch_reference(p, 1.1, 10.0, 0.0, p.omega_max_pu + 0.5, 0.5);
  EXPECT_EQ(c.beta_ref, p.beta_max);
  EXPECT_EQ(c.dz_speed, 0.0);
}

TEST(Pitch, RangeAndLimiterSignsRandomized) {
  PitchGains p;
  p.k_p = 270.0;
  p.beta_del_deg = 5.4;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.7, 1.4), pm(0.0, 1.5), z(-1.0, 2.0);
  for (int k = 0; k < 5000; ++k) {
    const auto c = pitch_reference(p, 1.2, z(rng), z(rng), w(rng), pm(rng));
    ASSERT_GE(c.beta_ref, 0.0);
    ASSERT_LE(c.beta_ref, 30.0);
    ASSERT_GE(c.u_speed, 0.0);
    ASSERT_GE(c.u_power, 0.0);
  }
}

TEST(Servo, HoldsAtReference) {
  PitchGains p;
  EXPECT_EQ(pitch_servo_rate(p, 4.0, 4.0), 0.0);
}

TEST(Servo, RateLimit) {
  PitchGains p;
  EXPECT_EQ(pitch_servo_rate(p, 0.0, 20.0), 8.0);
  EXPECT_EQ(pitch_servo_rate(p, 20.0, 1.0), -8.0);
}

TEST(Servo, HeldAtRangeEnds) {
  PitchGains p;
  EXPECT_EQ(pitch_servo_rate(p, 0.0, -1.0), 0.0);
  EXPECT_EQ(pitch_servo_rate(p, 30.0, 31.0), 0.0);
}

TEST(Servo, SmallStepTimeConstant) {
  PitchGains p;
  double b = 0.0;
  const double h = 1e-5;
  for (double t = 0.0; t < p.t_servo - 0.5 * h; t += h) b += h * pitch_servo_rate(p, b, 1.0);
  EXPECT_NEAR(b, 1.0 - std::exp(-1.0), 1e-4);
}

TEST(Gfl, RatingClampAndLowWind) {
  const TurbineParams p;
  const auto s = default_surface(p);
  EXPECT_EQ(gfl_mppt_emulation(p, s, 12.0).p_gsc, 1.0);
  EXPECT_EQ(gfl_mppt_emulation(p, s, 12.0).v_dc, 1.0);
  const auto m = find_mpp(s);
  const double w = m.lambda * 8.0 / p.rotor_radius;
  const double expect = wind_power(p, s, 8.0, w, 0.0) / (p.n_agg * p.rated_power);
  EXPECT_NEAR(gfl_mppt_emulation(p, s, 8.0).p_gsc, expect, 1e-12);
}

TEST(Gains, RatioCondition) {
  ControlGains g;
  EXPECT_TRUE(g.ratio_condition());
  g.msc.k_theta = 6.6;
  EXPECT_FALSE(g.ratio_condition());
  g.msc.k_d = g.gsc.k_d * g.msc.k_theta / g.gsc.k_theta;
  EXPECT_TRUE(g.ratio_condition());
}

TEST(Gains, Validate) {
  ControlGains g;
  EXPECT_NO_THROW(g.validate());
  g.gsc.t_v = 0.0;
  EXPECT_THROW(g.validate(), ConfigError);
  g = {};
  g.msc.k_d = -1.0;
  EXPECT_THROW(g.validate(), ConfigError);
}
