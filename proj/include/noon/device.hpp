// Physical parameters of the qutrit + two-resonator device and the couplings,
// detunings and timing formulas derived from them. All frequencies are
// angular (rad/s); conversion from ordinary frequency happens at ingestion.
#pragma once

#include "noon/qspace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace noon {

struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double mhz(double v) { return kTwoPi * v * 1e6; }
inline constexpr double ghz(double v) { return kTwoPi * v * 1e9; }
inline constexpr double to_mhz(double angular) { return angular / (kTwoPi * 1e6); }
inline constexpr double ns(double v) { return v * 1e-9; }
inline constexpr double us(double v) { return v * 1e-6; }
/// Rate from a lifetime; a non-positive lifetime disables the channel.
inline double rate_from_lifetime(double lifetime_s) { return lifetime_s > 0 ? 1.0 / lifetime_s : 0.0; }

struct DeviceParams {
  double omega_a = ghz(6.0);
  double omega_b = ghz(3.5);
  double delta1 = mhz(-400.0);
  double delta2 = mhz(-400.0);
  double delta3 = mhz(400.0);
  double delta4 = mhz(400.0);
  double g = mhz(1.8);
  double Omega = mhz(18.0);
  double gab_ratio = 0.0;
  double gamma_phi_f = 1.0 / us(3.0);
  double gamma_phi_e = 1.0 / us(3.0);
  double gamma_fe = 1.0 / us(1.5);
  double gamma_eg = 1.0 / us(3.0);
  double kappa_a = 1.0 / us(20.0);
  double kappa_b = 1.0 / us(20.0);
  double t_d = ns(1.0);
  double C_c = 1e-15;
  double C_q = 98e-15;
  int n_guard = 2;

  void validate() const {
    auto fail = [](const std::string& m) { throw parameter_error("DeviceParams: " + m); };
    if (!(omega_a > omega_b && omega_b > 0)) fail("need omega_a > omega_b > 0");
    if (!(delta1 < 0 && delta2 < 0)) fail("delta1, delta2 must be negative");
    if (!(delta3 > 0 && delta4 > 0)) fail("delta3, delta4 must be positive");
    if (!(g > 0)) fail("g must be positive");
    if (!(Omega > 0)) fail("Omega must be positive");
    if (gab_ratio < 0) fail("gab_ratio must be >= 0");
    for (double r : {gamma_phi_f, gamma_phi_e, gamma_fe, gamma_eg, kappa_a, kappa_b})
      if (!(r >= 0) || !std::isfinite(r)) fail("rates must be finite and >= 0");
    if (!(t_d >= 0)) fail("t_d must be >= 0");
    if (n_guard < 1) fail("n_guard must be >= 1");
  }

  /// Coherence-time scaling: gamma_phi^-1 = T, gamma_fe^-1 = T/2, gamma_eg^-1 = T.
  DeviceParams with_coherence_time(double T) const {
    if (!(T > 0)) throw parameter_error("coherence time T must be positive");
    DeviceParams p = *this;
    p.gamma_phi_f = 1.0 / T;
    p.gamma_phi_e = 1.0 / T;
    p.gamma_fe = 2.0 / T;
    p.gamma_eg = 1.0 / T;
    return p;
  }

  DeviceParams without_dissipation() const {
    DeviceParams p = *this;
    p.gamma_phi_f = p.gamma_phi_e = p.gamma_fe = p.gamma_eg = p.kappa_a = p.kappa_b = 0.0;
    return p;
  }
};

struct DerivedCouplings {
  // qutrit-resonator couplings
  double g_eg, g_fe, gt_fe, gt_eg;
  double mu_eg, mu_fe, mut_eg, mut_fe;
  double g_ab;
  // pulse Rabi rates
  double Omega_eg, Omega_fe, Omegat_fe, Omegat_eg;
  // detunings
  double delta1, delta2, delta3, delta4;
  double delta_eg, delta_fe, deltat_eg, deltat_fe, Delta;
  // level spacings: stage 1 and (primed) stage 2
  double omega_eg, omega_fe, omega_eg_p, omega_fe_p;
  double omega_a, omega_b;
};

inline DerivedCouplings derive_couplings(const DeviceParams& p) {
  p.validate();
  const double sqrt2 = std::sqrt(2.0);
  const double up = std::sqrt(p.omega_b / p.omega_a);
  const double down = std::sqrt(p.omega_a / p.omega_b);
  DerivedCouplings d{};
  d.omega_a = p.omega_a;
  d.omega_b = p.omega_b;
  // stage 1: resonator a resonant with g<->e
  d.omega_eg = p.omega_a;
  d.omega_fe = p.omega_a + p.delta1;
  // stage 2: resonator b resonant with e<->f
  d.omega_fe_p = p.omega_b;
  d.omega_eg_p = p.omega_b + p.delta3;

  d.delta1 = p.delta1;
  d.delta2 = p.delta2;
  d.delta3 = p.delta3;
  d.delta4 = p.delta4;
  d.delta_eg = d.omega_eg - p.omega_b;
  d.delta_fe = d.omega_fe - p.omega_b;
  d.deltat_eg = d.omega_eg_p - p.omega_a;
  d.deltat_fe = d.omega_fe_p - p.omega_a;
  d.Delta = p.omega_b - p.omega_a;

  d.g_eg = p.g;
  d.gt_eg = p.g;
  d.g_fe = sqrt2 * p.g;
  d.gt_fe = sqrt2 * p.g;
  d.mu_eg = p.g * up;
  d.mu_fe = sqrt2 * p.g * up;
  d.mut_eg = p.g * down;
  d.mut_fe = sqrt2 * p.g * down;
  d.g_ab = p.gab_ratio * p.g;

  d.Omega_eg = p.Omega;
  d.Omega_fe = p.Omega;
  d.Omegat_fe = sqrt2 * p.Omega;
  d.Omegat_eg = p.Omega / sqrt2;
  return d;
}

/// Couplings with every unwanted term (off-resonant, crosstalk, spectator
/// pulse transitions) removed; what the ideal procedure assumes.
inline DerivedCouplings ideal_couplings(DerivedCouplings d) {
  d.gt_fe = d.gt_eg = 0.0;
  d.mu_eg = d.mu_fe = d.mut_eg = d.mut_fe = 0.0;
  d.g_ab = 0.0;
  d.Omegat_fe = d.Omegat_eg = 0.0;
  return d;
}

/// Inter-resonator crosstalk mediated by the coupling capacitances:
/// g_ab = g * C_c / (2 C_c + C_q).
inline double crosstalk_g_ab(double g, double C_c, double C_q) {
  if (C_c < 0 || !(C_q > 0)) throw parameter_error("crosstalk_g_ab: capacitances must be positive");
  return g * C_c / (2.0 * C_c + C_q);
}

/// Total protocol duration: both swap ladders, N eg-pulses, N-1 fe-pulses and
/// three retune idles.
inline double tau_total(int N, const DerivedCouplings& d, const DeviceParams& p) {
  if (N < 1) throw parameter_error("tau_total: N must be >= 1");
  double tau = 0.0;
  for (int j = 1; j <= N; ++j) {
    const double sj = std::sqrt(static_cast<double>(j));
    tau += kPi / (2.0 * sj * d.g_eg);
    tau += kPi / (2.0 * sj * d.g_fe);
  }
  tau += N * kPi / (2.0 * d.Omega_eg);
  tau += (N - 1) * kPi / (2.0 * d.Omega_fe);
  tau += 3.0 * p.t_d;
  return tau;
}

/// Lifetime of the two-resonator entanglement: half the shorter of the
/// per-resonator lifetimes (Q / 2 pi nu) / nbar.
inline double t_cav(double Q_a, double Q_b, double nu_a, double nu_b, double nbar_a, double nbar_b) {
  for (double v : {Q_a, Q_b, nu_a, nu_b, nbar_a, nbar_b})
    if (!(v > 0)) throw parameter_error("t_cav: inputs must be positive");
  const double ta = (Q_a / (kTwoPi * nu_a)) / nbar_a;
  const double tb = (Q_b / (kTwoPi * nu_b)) / nbar_b;
  return 0.5 * std::min(ta, tb);
}

/// Loaded quality factor implied by a photon decay rate: Q = 2 pi nu / kappa.
inline double quality_factor(double nu, double kappa) {
  if (!(nu > 0) || !(kappa > 0)) throw parameter_error("quality_factor: inputs must be positive");
  return kTwoPi * nu / kappa;
}

}  // namespace noon
