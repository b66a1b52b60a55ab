// Command dispatch for the noon-sim tool. Kept in a header so the test suite
// can drive the exact same code path as the executable.
#pragma once

#include "noon/config.hpp"
#include "noon/device.hpp"
#include "noon/experiments.hpp"
#include "noon/protocol.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace noon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitPhysics = 2;

inline nlohmann::json resolved_params_json(const DeviceParams& p, const DerivedCouplings& d) {
  return {
      {"omega_a", p.omega_a},     {"omega_b", p.omega_b},       {"g", p.g},
      {"Omega", p.Omega},         {"gab_ratio", p.gab_ratio},   {"gamma_phi_f", p.gamma_phi_f},
      {"gamma_phi_e", p.gamma_phi_e}, {"gamma_fe", p.gamma_fe}, {"gamma_eg", p.gamma_eg},
      {"kappa_a", p.kappa_a},     {"kappa_b", p.kappa_b},       {"t_d", p.t_d},
      {"n_guard", p.n_guard},
      {"derived",
       {{"g_eg", d.g_eg},           {"g_fe", d.g_fe},           {"gt_fe", d.gt_fe},
        {"gt_eg", d.gt_eg},         {"mu_eg", d.mu_eg},         {"mu_fe", d.mu_fe},
        {"mut_eg", d.mut_eg},       {"mut_fe", d.mut_fe},       {"g_ab", d.g_ab},
        {"Omega_eg", d.Omega_eg},   {"Omega_fe", d.Omega_fe},   {"Omegat_fe", d.Omegat_fe},
        {"Omegat_eg", d.Omegat_eg}, {"delta1", d.delta1},       {"delta2", d.delta2},
        {"delta3", d.delta3},       {"delta4", d.delta4},       {"delta_eg", d.delta_eg},
        {"delta_fe", d.delta_fe},   {"deltat_eg", d.deltat_eg}, {"deltat_fe", d.deltat_fe},
        {"Delta", d.Delta},         {"omega_eg", d.omega_eg},   {"omega_fe", d.omega_fe},
        {"omega_eg_p", d.omega_eg_p}, {"omega_fe_p", d.omega_fe_p}}},
  };
}

namespace detail {

inline ConfigFile read_config(const std::string& path) {
  return path.empty() ? ConfigFile{} : load_config(path);
}

inline double g_for(const ConfigFile& cfg, std::optional<double> flag, int N) {
  if (flag) return *flag;
  if (cfg.g_mhz) return *cfg.g_mhz;
  return optimal_g_mhz(N);
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad number in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list: '" + s + "'");
  return out;
}

inline bool write_table(const std::string& path, const ResultTable& rows, const std::string& comment,
                        std::ostream& out, std::ostream& err) {
  std::ostringstream os;
  write_csv(os, rows, comment);
  if (path.empty() || path == "-") {
    out << os.str();
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << os.str())) {
    err << "error: cannot write output file: " << path << '\n';
    return false;
  }
  return true;
}

inline std::string describe_config(const std::string& path) {
  return path.empty() ? std::string("defaults") : path;
}

}  // namespace detail

inline int cmd_ideal(int N, bool checkpoints, std::ostream& out) {
  const HilbertSpace space = protocol_space(N, 2);
  auto dump = [&](const std::string& title, const Ket& k) {
    out << "# " << title << '\n';
    for (int i = 0; i < space.total_dim(); ++i) {
      const cplx a = k.amplitudes(i);
      if (std::abs(a) < 1e-15) continue;
      out << space.label(i) << ' ' << fmt9(a.real()) << ' ' << fmt9(a.imag()) << '\n';
    }
  };
  dump("noon N=" + std::to_string(N), ideal_noon_state(N, space));
  if (checkpoints)
    for (Checkpoint c : kAllCheckpoints)
      if (checkpoint_valid(N, c)) dump(to_string(c), ideal_intermediate_state(N, c, space));
  return kExitOk;
}

struct RunOptions {
  std::string config_path;
  int N = 1;
  std::optional<double> gab_ratio;
  std::optional<double> g_mhz;
  RunMode mode = RunMode::full;
  std::string out_path;
};

inline int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  ConfigFile cfg = detail::read_config(o.config_path);
  if (o.gab_ratio) cfg.gab_ratio = *o.gab_ratio;
  cfg.g_mhz = detail::g_for(cfg, o.g_mhz, o.N);
  const DeviceParams p = cfg.device(*cfg.g_mhz);
  const IntegratorConfig ic = cfg.integrator();
  const DerivedCouplings d = derive_couplings(p);

  std::optional<SimResult> maybe;
  try {
    maybe.emplace(run_protocol(o.N, p, ic, o.mode));
  } catch (const truncation_error& e) {
    err << "physics error: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const integration_error& e) {
    err << "physics error: " << e.what() << '\n';
    return kExitPhysics;
  }
  const SimResult& r = *maybe;
  const double F = fidelity(r.rho_final, ideal_noon_state(o.N, r.rho_final.space));

  nlohmann::json doc;
  doc["command"] = "run";
  doc["n"] = o.N;
  doc["mode"] = to_string(o.mode);
  doc["config"] = config_to_json(cfg);
  doc["resolved_rad_per_s"] = resolved_params_json(p, d);
  nlohmann::json sched = nlohmann::json::array();
  for (const auto& s : r.schedule.segments)
    sched.push_back({{"kind", to_string(s.kind)},
                     {"stage", s.stage},
                     {"step", s.step_index},
                     {"duration_s", s.duration},
                     {"clock_start_s", s.clock_start}});
  doc["schedule"] = sched;
  doc["fidelity"] = F;
  doc["tau_s"] = tau_total(o.N, d, p);
  doc["trace_drift"] = r.max_trace_drift;
  doc["min_eigenvalue"] = r.min_eigenvalue;
  doc["top_population_a"] = r.top_population_a;
  doc["top_population_b"] = r.top_population_b;
  doc["g_ab_capacitive_estimate"] = crosstalk_g_ab(p.g, p.C_c, p.C_q);
  if (p.kappa_a > 0 && p.kappa_b > 0) {
    const double nu_a = p.omega_a / kTwoPi, nu_b = p.omega_b / kTwoPi;
    const double nbar = o.N / 2.0;
    doc["t_cav_s"] = t_cav(quality_factor(nu_a, p.kappa_a), quality_factor(nu_b, p.kappa_b), nu_a,
                           nu_b, nbar, nbar);
  } else {
    doc["t_cav_s"] = nullptr;
  }
  const bool ok = r.physical();
  doc["physical"] = ok;

  const std::string text = doc.dump(2) + "\n";
  if (o.out_path.empty() || o.out_path == "-") {
    out << text;
  } else {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f || !(f << text)) {
      err << "error: cannot write output file: " << o.out_path << '\n';
      return kExitUsage;
    }
    out << "fidelity " << fmt9(F) << '\n';
  }
  if (!ok) {
    err << "physics diagnostics failed: drift=" << r.max_trace_drift
        << " min_eig=" << r.min_eigenvalue << " top_a=" << r.top_population_a
        << " top_b=" << r.top_population_b << '\n';
    return kExitPhysics;
  }
  return kExitOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"NOON-state protocol simulator: qutrit coupled to two resonators"};
  app.require_subcommand(1);

  int ideal_n = 1;
  bool ideal_checkpoints = false;
  auto* ideal = app.add_subcommand("ideal", "print the ideal NOON ket (and ladder checkpoints)");
  ideal->add_option("--n", ideal_n, "photon number N")->required();
  ideal->add_flag("--checkpoints", ideal_checkpoints, "also print the intermediate states");

  RunOptions ro;
  std::string mode_str = "full";
  auto* run = app.add_subcommand("run", "simulate one protocol run and write a result document");
  run->add_option("--config", ro.config_path, "JSON config file");
  run->add_option("--n", ro.N, "photon number N")->required();
  run->add_option("--gab-ratio", ro.gab_ratio, "crosstalk g_ab / g");
  run->add_option("--g-mhz", ro.g_mhz, "coupling g/2pi in MHz");
  run->add_option("--mode", mode_str, "full|ideal")->check(CLI::IsMember({"full", "ideal"}));
  run->add_option("--out", ro.out_path, "result document path (default stdout)");

  std::string sn_config, sn_out, sn_gab = "0,1,2", sn_g = "paper", sn_n;
  int sn_nmax = 5;
  unsigned sn_threads = 1;
  auto* sweep_n = app.add_subcommand("sweep-n", "fidelity versus N");
  sweep_n->add_option("--config", sn_config, "JSON config file");
  sweep_n->add_option("--n-max", sn_nmax, "sweep N = 1..n-max");
  sweep_n->add_option("--n", sn_n, "explicit comma-separated N list (overrides --n-max)");
  sweep_n->add_option("--gab-ratios", sn_gab, "comma-separated g_ab/g ratios");
  sweep_n->add_option("--g-mhz", sn_g, "comma-separated g/2pi list in MHz, or 'paper'");
  sweep_n->add_option("--threads", sn_threads, "worker threads");
  sweep_n->add_option("--out", sn_out, "CSV output path (default stdout)");

  std::string og_config, og_out;
  int og_n = 3;
  double og_lo = 0.5, og_hi = 5.0, og_tol = 0.05;
  std::optional<double> og_gab;
  auto* opt_g = app.add_subcommand("optimize-g", "golden-section maximisation of F over g");
  opt_g->add_option("--config", og_config, "JSON config file");
  opt_g->add_option("--n", og_n, "photon number N");
  opt_g->add_option("--g-min-mhz", og_lo, "lower bracket (MHz)");
  opt_g->add_option("--g-max-mhz", og_hi, "upper bracket (MHz)");
  opt_g->add_option("--tol-mhz", og_tol, "bracket tolerance (MHz)");
  opt_g->add_option("--gab-ratio", og_gab, "crosstalk g_ab / g");
  opt_g->add_option("--out", og_out, "CSV output path (default stdout)");

  std::string tg_config, tg_out, tg_t = "2,4,6,8,10", tg_g = "1.0,1.4,1.8,2.2,2.6";
  int tg_n = 3;
  std::optional<double> tg_gab;
  unsigned tg_threads = 1;
  auto* sweep_tg = app.add_subcommand("sweep-tg", "fidelity over a (T, g) grid");
  sweep_tg->add_option("--config", tg_config, "JSON config file");
  sweep_tg->add_option("--n", tg_n, "photon number N");
  sweep_tg->add_option("--t-us", tg_t, "comma-separated coherence times T in us");
  sweep_tg->add_option("--g-mhz", tg_g, "comma-separated g/2pi list in MHz");
  sweep_tg->add_option("--gab-ratio", tg_gab, "crosstalk g_ab / g");
  sweep_tg->add_option("--threads", tg_threads, "worker threads");
  sweep_tg->add_option("--out", tg_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*ideal) {
      if (ideal_n < 1) throw std::invalid_argument("N must be >= 1");
      return cmd_ideal(ideal_n, ideal_checkpoints, out);
    }
    if (*run) {
      if (ro.N < 1) throw std::invalid_argument("N must be >= 1");
      ro.mode = mode_str == "ideal" ? RunMode::ideal : RunMode::full;
      return cmd_run(ro, out, err);
    }
    if (*sweep_n) {
      const ConfigFile cfg = detail::read_config(sn_config);
      SweepSpec spec;
      if (!sn_n.empty()) {
        for (double v : detail::parse_list(sn_n)) spec.n_values.push_back(static_cast<int>(v));
      } else {
        for (int n = 1; n <= sn_nmax; ++n) spec.n_values.push_back(n);
      }
      spec.gab_ratios = detail::parse_list(sn_gab);
      if (sn_g != "paper")
        spec.g_mhz = detail::parse_list(sn_g);
      else if (cfg.g_mhz)
        spec.g_mhz = std::vector<double>{*cfg.g_mhz};
      spec.integrator = cfg.integrator();
      spec.threads = sn_threads;
      const DeviceParams base = cfg.device(cfg.g_mhz.value_or(1.0));
      const auto rows = sweep_N(spec, base);
      const std::string comment = "noon-sim sweep-n config=" + detail::describe_config(sn_config);
      return detail::write_table(sn_out, rows, comment, out, err) ? kExitOk : kExitUsage;
    }
    if (*opt_g) {
      ConfigFile cfg = detail::read_config(og_config);
      if (og_gab) cfg.gab_ratio = *og_gab;
      const DeviceParams base = cfg.device(cfg.g_mhz.value_or(1.0));
      const IntegratorConfig ic = cfg.integrator();
      const GOptimum best = optimize_g(og_n, mhz(og_lo), mhz(og_hi), mhz(og_tol), base, ic);
      GridPoint gp{og_n, base, 1e6 * (base.gamma_phi_e > 0 ? 1.0 / base.gamma_phi_e : 0.0)};
      gp.params.g = best.g;
      const ResultTable rows{evaluate_point(gp, ic)};
      const std::string comment = "noon-sim optimize-g config=" +
                                  detail::describe_config(og_config) +
                                  " evaluations=" + std::to_string(best.evaluations);
      return detail::write_table(og_out, rows, comment, out, err) ? kExitOk : kExitUsage;
    }
    if (*sweep_tg) {
      ConfigFile cfg = detail::read_config(tg_config);
      if (tg_gab) cfg.gab_ratio = *tg_gab;
      const DeviceParams base = cfg.device(cfg.g_mhz.value_or(1.0));
      const auto rows = sweep_T_g(tg_n, detail::parse_list(tg_t), detail::parse_list(tg_g), base,
                                  cfg.integrator(), tg_threads);
      const std::string comment = "noon-sim sweep-tg config=" + detail::describe_config(tg_config);
      return detail::write_table(tg_out, rows, comment, out, err) ? kExitOk : kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace noon::cli
