#include "noon/device.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace noon;

namespace {

// term-by-term evaluation of the duration formula, in plain seconds
double tau_oracle(int N, double g_mhz, double omega_mhz, double td_ns) {
  const double g = 2 * M_PI * g_mhz * 1e6;
  const double gfe = std::sqrt(2.0) * g;
  const double om = 2 * M_PI * omega_mhz * 1e6;
  double t = 0;
  for (int j = 1; j <= N; ++j) t += M_PI / (2 * std::sqrt(j) * g);
  for (int j = 1; j <= N; ++j) t += M_PI / (2 * std::sqrt(j) * gfe);
  t += N * M_PI / (2 * om) + (N - 1) * M_PI / (2 * om) + 3 * td_ns * 1e-9;
  return t;
}

DeviceParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DeviceParams p;
  p.omega_b = ghz(2.0 + 3.0 * u(rng));
  p.omega_a = p.omega_b + ghz(0.5 + 3.0 * u(rng));
  p.delta1 = mhz(-100 - 600 * u(rng));
  p.delta2 = mhz(-100 - 600 * u(rng));
  p.delta3 = mhz(100 + 600 * u(rng));
  p.delta4 = mhz(100 + 600 * u(rng));
  p.g = mhz(0.5 + 5 * u(rng));
  p.Omega = mhz(5 + 30 * u(rng));
  p.gab_ratio = 2 * u(rng);
  return p;
}

}  // namespace

TEST(DeriveCouplings, StageOneDetunings) {
  const DerivedCouplings d = derive_couplings(DeviceParams{});
  EXPECT_NEAR(to_mhz(d.omega_fe), 5600.0, 1e-9);
  EXPECT_NEAR(to_mhz(d.delta_eg), 2500.0, 1e-9);
  EXPECT_NEAR(to_mhz(d.delta_fe), 2100.0, 1e-9);
}

TEST(DeriveCouplings, StageTwoDetunings) {
  const DerivedCouplings d = derive_couplings(DeviceParams{});
  EXPECT_NEAR(to_mhz(d.omega_eg_p), 3900.0, 1e-9);
  EXPECT_NEAR(to_mhz(d.deltat_eg), -2100.0, 1e-9);
  EXPECT_NEAR(to_mhz(d.deltat_fe), -2500.0, 1e-9);
  EXPECT_NEAR(to_mhz(d.Delta), -2500.0, 1e-9);
}

TEST(DeriveCouplings, OffResonantCouplings) {
  DeviceParams p;
  p.g = mhz(1.8);
  const DerivedCouplings d = derive_couplings(p);
  EXPECT_NEAR(to_mhz(d.mu_eg), 1.8 * std::sqrt(3.5 / 6.0), 1e-12);
  EXPECT_NEAR(to_mhz(d.mu_eg), 1.375, 1e-3);
  EXPECT_NEAR(to_mhz(d.mut_fe), 3.333, 1e-3);
  EXPECT_NEAR(d.g_fe / d.g_eg, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(d.gt_fe / d.g_eg, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(d.Omegat_fe / p.Omega, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(d.Omegat_eg * std::sqrt(2.0) / p.Omega, 1.0, 1e-12);
}

TEST(DeriveCouplings, SignInvariantsHoldForRandomParams) {
  std::mt19937 rng(3);
  for (int k = 0; k < 200; ++k) {
    const DerivedCouplings d = derive_couplings(random_params(rng));
    EXPECT_LT(d.Delta, 0);
    EXPECT_GT(d.delta_eg, 0);
    EXPECT_LT(d.deltat_fe, 0);
    EXPECT_LT(d.delta1, 0);
    EXPECT_GT(d.delta3, 0);
  }
}

TEST(DeriveCouplings, ScaleCovariantInG) {
  std::mt19937 rng(5);
  for (int k = 0; k < 50; ++k) {
    DeviceParams p = random_params(rng);
    const DerivedCouplings d1 = derive_couplings(p);
    p.g *= 2;
    const DerivedCouplings d2 = derive_couplings(p);
    for (auto [x, y] : {std::pair{d1.g_eg, d2.g_eg}, {d1.g_fe, d2.g_fe}, {d1.gt_fe, d2.gt_fe},
                        {d1.gt_eg, d2.gt_eg}, {d1.mu_eg, d2.mu_eg}, {d1.mu_fe, d2.mu_fe},
                        {d1.mut_eg, d2.mut_eg}, {d1.mut_fe, d2.mut_fe}, {d1.g_ab, d2.g_ab}})
      EXPECT_NEAR(y, 2 * x, 1e-9 * std::abs(y));
    EXPECT_EQ(d1.Delta, d2.Delta);
    EXPECT_EQ(d1.delta_eg, d2.delta_eg);
    EXPECT_EQ(d1.deltat_fe, d2.deltat_fe);
  }
}

TEST(DeviceParams, ValidationRejectsBadSigns) {
  DeviceParams p;
  p.delta1 = mhz(400);
  EXPECT_THROW(p.validate(), parameter_error);
  p = DeviceParams{};
  p.omega_b = ghz(7.0);
  EXPECT_THROW(p.validate(), parameter_error);
  p = DeviceParams{};
  p.kappa_a = -1;
  EXPECT_THROW(p.validate(), parameter_error);
  p = DeviceParams{};
  p.g = 0;
  EXPECT_THROW(derive_couplings(p), parameter_error);
}

TEST(DeviceParams, CoherenceTimeRule) {
  const DeviceParams p = DeviceParams{}.with_coherence_time(us(10));
  EXPECT_NEAR(1.0 / p.gamma_phi_f, 10e-6, 1e-18);
  EXPECT_NEAR(1.0 / p.gamma_phi_e, 10e-6, 1e-18);
  EXPECT_NEAR(1.0 / p.gamma_fe, 5e-6, 1e-18);
  EXPECT_NEAR(1.0 / p.gamma_eg, 10e-6, 1e-18);
  EXPECT_EQ(p.kappa_a, DeviceParams{}.kappa_a);
}

TEST(Crosstalk, CapacitanceRatio) {
  const double g = mhz(2.0);
  EXPECT_NEAR(crosstalk_g_ab(g, 1e-15, 98e-15), 0.01 * g, 1e-12 * g);
  EXPECT_EQ(crosstalk_g_ab(g, 0.0, 98e-15), 0.0);
  // C_c ~ 1 fF with C_sigma ~ 1e2 fF keeps crosstalk below 0.1 g
  EXPECT_LE(crosstalk_g_ab(g, 1e-15, 100e-15 - 2e-15), 0.1 * g);
  EXPECT_THROW(crosstalk_g_ab(g, -1e-15, 98e-15), parameter_error);
  EXPECT_THROW(crosstalk_g_ab(g, 1e-15, 0.0), parameter_error);
}

TEST(TauTotal, MatchesTermByTermOracle) {
  DeviceParams p;
  p.g = mhz(3.9);
  p.t_d = ns(1.0);
  const double t1 = tau_total(1, derive_couplings(p), p);
  EXPECT_NEAR(t1, tau_oracle(1, 3.9, 18.0, 1.0), 1e-21);
  EXPECT_NEAR(t1 * 1e9, 126.3, 0.05);

  p.g = mhz(1.8);
  const double t3 = tau_total(3, derive_couplings(p), p);
  EXPECT_NEAR(t3, tau_oracle(3, 1.8, 18.0, 1.0), 1e-21);
  EXPECT_NEAR(t3 * 1e9, 614.085, 0.01);
  EXPECT_NEAR(t3 * 1e9, 616.0, 2.5);  // quoted as "approximately 616 ns"
}

TEST(TauTotal, SwapOnlyLimit) {
  DeviceParams p;
  p.g = mhz(2.0);
  p.t_d = 0;
  p.Omega = mhz(1e9);
  const DerivedCouplings d = derive_couplings(p);
  const double expected = kPi / (2 * d.g_eg) + kPi / (2 * d.g_fe);
  EXPECT_NEAR(tau_total(1, d, p), expected, 1e-6 * expected);
}

TEST(TauTotal, StrictlyDecreasingInGAndOmega) {
  for (int N = 1; N <= 5; ++N) {
    double prev = 1e9;
    for (double g = 0.5; g < 6; g += 0.5) {
      DeviceParams p;
      p.g = mhz(g);
      const double t = tau_total(N, derive_couplings(p), p);
      EXPECT_LT(t, prev);
      prev = t;
    }
    prev = 1e9;
    for (double om = 5; om < 60; om += 5) {
      DeviceParams p;
      p.Omega = mhz(om);
      const double t = tau_total(N, derive_couplings(p), p);
      EXPECT_LT(t, prev);
      prev = t;
    }
  }
}

TEST(TauTotal, RejectsZeroN) {
  DeviceParams p;
  EXPECT_THROW(tau_total(0, derive_couplings(p), p), parameter_error);
}

TEST(TCav, ReportedQualityFactors) {
  // lifetime Q / (2 pi nu) for Q_a ~ 7.5e5 at 6 GHz and Q_b ~ 4.4e5 at 3.5 GHz
  const double ta = 7.5e5 / (2 * M_PI * 6e9);
  const double tb = 4.4e5 / (2 * M_PI * 3.5e9);
  EXPECT_NEAR(ta * 1e6, 19.9, 0.05);
  EXPECT_NEAR(tb * 1e6, 20.0, 0.05);
  EXPECT_NEAR(t_cav(7.5e5, 4.4e5, 6e9, 3.5e9, 1, 1), 0.5 * std::min(ta, tb), 1e-18);
  EXPECT_NEAR(t_cav(7.5e5, 7.5e5, 6e9, 6e9, 1, 1), 0.5 * ta, 1e-18);
  EXPECT_THROW(t_cav(0, 1, 1, 1, 1, 1), parameter_error);
  EXPECT_THROW(t_cav(1, 1, 1, 1, 1, -1), parameter_error);
}

TEST(TCav, QualityFactorFromDecay) {
  EXPECT_NEAR(quality_factor(6e9, 1.0 / 20e-6) / 7.5e5, 1.0, 0.01);
  EXPECT_NEAR(quality_factor(3.5e9, 1.0 / 20e-6) / 4.4e5, 1.0, 0.01);
}
