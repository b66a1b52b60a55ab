// Configuration documents. Units live in the key names; this is the only
// place where MHz/GHz/ns/us/fF values become rad/s, seconds and farads.
#pragma once

#include "noon/device.hpp"
#include "noon/lindblad.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace noon {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigFile {
  // device
  double omega_a_ghz = 6.0;
  double omega_b_ghz = 3.5;
  double delta1_mhz = -400.0;
  double delta2_mhz = -400.0;
  double delta3_mhz = 400.0;
  double delta4_mhz = 400.0;
  std::optional<double> g_mhz;  // absent: reference value for the requested N
  double omega_rabi_mhz = 18.0;
  double gab_ratio = 0.0;
  double kappa_a_inv_us = 20.0;  // lifetimes; 0 disables the channel
  double kappa_b_inv_us = 20.0;
  double gamma_fe_inv_us = 1.5;
  double gamma_eg_inv_us = 3.0;
  double gamma_phi_f_inv_us = 3.0;
  double gamma_phi_e_inv_us = 3.0;
  double t_d_ns = 1.0;
  double c_c_ff = 1.0;
  double c_q_ff = 98.0;
  int n_guard = 2;
  // integrator
  double dt_max_ps = 1000.0;
  int samples_per_period = 40;
  int record_stride = 0;

  DeviceParams device(double g_fallback_mhz) const {
    DeviceParams p;
    p.omega_a = ghz(omega_a_ghz);
    p.omega_b = ghz(omega_b_ghz);
    p.delta1 = mhz(delta1_mhz);
    p.delta2 = mhz(delta2_mhz);
    p.delta3 = mhz(delta3_mhz);
    p.delta4 = mhz(delta4_mhz);
    p.g = mhz(g_mhz.value_or(g_fallback_mhz));
    p.Omega = mhz(omega_rabi_mhz);
    p.gab_ratio = gab_ratio;
    p.kappa_a = rate_from_lifetime(us(kappa_a_inv_us));
    p.kappa_b = rate_from_lifetime(us(kappa_b_inv_us));
    p.gamma_fe = rate_from_lifetime(us(gamma_fe_inv_us));
    p.gamma_eg = rate_from_lifetime(us(gamma_eg_inv_us));
    p.gamma_phi_f = rate_from_lifetime(us(gamma_phi_f_inv_us));
    p.gamma_phi_e = rate_from_lifetime(us(gamma_phi_e_inv_us));
    p.t_d = ns(t_d_ns);
    p.C_c = c_c_ff * 1e-15;
    p.C_q = c_q_ff * 1e-15;
    p.n_guard = n_guard;
    p.validate();
    return p;
  }

  IntegratorConfig integrator() const {
    IntegratorConfig c;
    c.dt_max = dt_max_ps * 1e-12;
    c.samples_per_fastest_period = samples_per_period;
    c.record_stride = record_stride;
    c.validate();
    return c;
  }
};

namespace detail {

template <typename T>
void take(const nlohmann::json& sec, const char* key, T& dst, std::set<std::string>& seen) {
  if (!sec.contains(key)) return;
  seen.insert(key);
  try {
    dst = sec.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config key '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& sec, const std::set<std::string>& seen,
                           const std::string& section) {
  for (const auto& [k, v] : sec.items())
    if (!seen.count(k)) throw config_error("unknown config key '" + section + "." + k + "'");
}

}  // namespace detail

inline ConfigFile config_from_json(const nlohmann::json& j) {
  ConfigFile c;
  if (!j.is_object()) throw config_error("config document must be an object");
  for (const auto& [k, v] : j.items())
    if (k != "device" && k != "integrator") throw config_error("unknown config section '" + k + "'");

  if (j.contains("device")) {
    const auto& d = j.at("device");
    if (!d.is_object()) throw config_error("section 'device' must be an object");
    std::set<std::string> seen;
    detail::take(d, "omega_a_ghz", c.omega_a_ghz, seen);
    detail::take(d, "omega_b_ghz", c.omega_b_ghz, seen);
    detail::take(d, "delta1_mhz", c.delta1_mhz, seen);
    detail::take(d, "delta2_mhz", c.delta2_mhz, seen);
    detail::take(d, "delta3_mhz", c.delta3_mhz, seen);
    detail::take(d, "delta4_mhz", c.delta4_mhz, seen);
    if (d.contains("g_mhz") && !d.at("g_mhz").is_null()) {
      double g = 0;
      detail::take(d, "g_mhz", g, seen);
      c.g_mhz = g;
    } else if (d.contains("g_mhz")) {
      seen.insert("g_mhz");
    }
    detail::take(d, "omega_rabi_mhz", c.omega_rabi_mhz, seen);
    detail::take(d, "gab_ratio", c.gab_ratio, seen);
    detail::take(d, "kappa_a_inv_us", c.kappa_a_inv_us, seen);
    detail::take(d, "kappa_b_inv_us", c.kappa_b_inv_us, seen);
    detail::take(d, "gamma_fe_inv_us", c.gamma_fe_inv_us, seen);
    detail::take(d, "gamma_eg_inv_us", c.gamma_eg_inv_us, seen);
    detail::take(d, "gamma_phi_f_inv_us", c.gamma_phi_f_inv_us, seen);
    detail::take(d, "gamma_phi_e_inv_us", c.gamma_phi_e_inv_us, seen);
    detail::take(d, "t_d_ns", c.t_d_ns, seen);
    detail::take(d, "c_c_ff", c.c_c_ff, seen);
    detail::take(d, "c_q_ff", c.c_q_ff, seen);
    detail::take(d, "n_guard", c.n_guard, seen);
    detail::reject_unknown(d, seen, "device");
  }
  if (j.contains("integrator")) {
    const auto& s = j.at("integrator");
    if (!s.is_object()) throw config_error("section 'integrator' must be an object");
    std::set<std::string> seen;
    detail::take(s, "dt_max_ps", c.dt_max_ps, seen);
    detail::take(s, "samples_per_period", c.samples_per_period, seen);
    detail::take(s, "record_stride", c.record_stride, seen);
    detail::reject_unknown(s, seen, "integrator");
  }
  return c;
}

inline nlohmann::json config_to_json(const ConfigFile& c) {
  nlohmann::json dev = {
      {"omega_a_ghz", c.omega_a_ghz},
      {"omega_b_ghz", c.omega_b_ghz},
      {"delta1_mhz", c.delta1_mhz},
      {"delta2_mhz", c.delta2_mhz},
      {"delta3_mhz", c.delta3_mhz},
      {"delta4_mhz", c.delta4_mhz},
      {"omega_rabi_mhz", c.omega_rabi_mhz},
      {"gab_ratio", c.gab_ratio},
      {"kappa_a_inv_us", c.kappa_a_inv_us},
      {"kappa_b_inv_us", c.kappa_b_inv_us},
      {"gamma_fe_inv_us", c.gamma_fe_inv_us},
      {"gamma_eg_inv_us", c.gamma_eg_inv_us},
      {"gamma_phi_f_inv_us", c.gamma_phi_f_inv_us},
      {"gamma_phi_e_inv_us", c.gamma_phi_e_inv_us},
      {"t_d_ns", c.t_d_ns},
      {"c_c_ff", c.c_c_ff},
      {"c_q_ff", c.c_q_ff},
      {"n_guard", c.n_guard},
  };
  dev["g_mhz"] = c.g_mhz ? nlohmann::json(*c.g_mhz) : nlohmann::json(nullptr);
  return {{"device", dev},
          {"integrator",
           {{"dt_max_ps", c.dt_max_ps},
            {"samples_per_period", c.samples_per_period},
            {"record_stride", c.record_stride}}}};
}

inline ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("cannot parse config file " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace noon
