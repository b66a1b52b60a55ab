// Fidelity evaluation, parameter sweeps and the scalar optimisation of g.
#pragma once

#include "noon/device.hpp"
#include "noon/lindblad.hpp"
#include "noon/protocol.hpp"
#include "noon/qspace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace noon {

/// F = <psi|rho|psi>, unclamped.
inline double fidelity_raw(const DensityMatrix& rho, const Ket& psi) {
  require_same(rho.space, psi.space, "fidelity");
  return psi.amplitudes.dot(rho.m * psi.amplitudes).real();
}

/// F = <psi|rho|psi>, clamped to [0, 1] for reporting.
inline double fidelity(const DensityMatrix& rho, const Ket& psi) {
  return std::clamp(fidelity_raw(rho, psi), 0.0, 1.0);
}

/// Second route: tr(rho |psi><psi|).
inline double fidelity_via_trace(const DensityMatrix& rho, const Ket& psi) {
  const Operator proj{psi.space, psi.amplitudes * psi.amplitudes.adjoint()};
  return expectation(proj, rho).real();
}

/// The coupling values used for each N in the reference fidelity curve (MHz).
inline double optimal_g_mhz(int N) {
  constexpr double table[] = {3.9, 2.2, 1.8, 1.5, 1.3};
  if (N < 1 || N > 5) throw parameter_error("no reference g for N = " + std::to_string(N));
  return table[N - 1];
}

struct ResultRow {
  int n = 0;
  double gab_ratio = 0.0;
  double g_mhz = 0.0;
  double t_us = 0.0;  // coherence time T or gamma_phi_e^-1 when rates are not scaled
  double fidelity = 0.0;
  double tau_ns = 0.0;
  double trace_drift = 0.0;
  double min_eig = 0.0;
  double top_population = 0.0;
  double wall_seconds = 0.0;
  std::string error;  // non-empty when the run failed

  auto key() const { return std::tie(n, gab_ratio, g_mhz, t_us); }
};

using ResultTable = std::vector<ResultRow>;

/// One grid point: the run is fully described by (N, params).
struct GridPoint {
  int n;
  DeviceParams params;
  double t_us;
};

inline ResultRow evaluate_point(const GridPoint& gp, const IntegratorConfig& cfg,
                                RunMode mode = RunMode::full) {
  ResultRow row;
  row.n = gp.n;
  row.gab_ratio = gp.params.gab_ratio;
  row.g_mhz = to_mhz(gp.params.g);
  row.t_us = gp.t_us;
  try {
    const DerivedCouplings d = derive_couplings(gp.params);
    row.tau_ns = tau_total(gp.n, d, gp.params) * 1e9;
    const SimResult r = run_protocol(gp.n, gp.params, cfg, mode);
    row.fidelity = fidelity(r.rho_final, ideal_noon_state(gp.n, r.rho_final.space));
    row.trace_drift = r.max_trace_drift;
    row.min_eig = r.min_eigenvalue;
    row.top_population = std::max(r.top_population_a, r.top_population_b);
    row.wall_seconds = r.wall_seconds;
  } catch (const std::exception& e) {
    row.error = e.what();
    row.fidelity = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

/// Evaluates every grid point on `threads` workers; output is in grid order
/// and then sorted by (n, gab_ratio, g, t), independent of completion order.
inline ResultTable run_grid(const std::vector<GridPoint>& grid, const IntegratorConfig& cfg,
                            unsigned threads = 1, RunMode mode = RunMode::full) {
  if (grid.empty()) throw std::invalid_argument("empty sweep grid");
  ResultTable rows(grid.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = evaluate_point(grid[i], cfg, mode);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++)
          rows[i] = evaluate_point(grid[i], cfg, mode);
      });
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& x, const ResultRow& y) { return x.key() < y.key(); });
  return rows;
}

struct SweepSpec {
  std::vector<int> n_values;
  std::vector<double> gab_ratios{0.0};
  std::optional<std::vector<double>> g_mhz;  // nullopt: reference g per N
  std::vector<double> t_us;                  // empty: keep the configured rates
  IntegratorConfig integrator;
  unsigned threads = 1;

  void validate() const {
    if (n_values.empty() || gab_ratios.empty()) throw std::invalid_argument("empty sweep grid");
    if (g_mhz && g_mhz->empty()) throw std::invalid_argument("empty g list");
    if (g_mhz)
      for (double g : *g_mhz)
        if (!(g > 0)) throw parameter_error("g must be positive");
    for (double t : t_us)
      if (!(t > 0)) throw parameter_error("T must be positive");
  }
};

inline std::vector<GridPoint> expand(const SweepSpec& spec, const DeviceParams& base) {
  spec.validate();
  std::vector<GridPoint> grid;
  for (int n : spec.n_values) {
    const std::vector<double> gs = spec.g_mhz ? *spec.g_mhz : std::vector<double>{optimal_g_mhz(n)};
    for (double ratio : spec.gab_ratios)
      for (double g : gs) {
        DeviceParams p = base;
        p.g = mhz(g);
        p.gab_ratio = ratio;
        if (spec.t_us.empty()) {
          grid.push_back({n, p, 1e6 * (p.gamma_phi_e > 0 ? 1.0 / p.gamma_phi_e : 0.0)});
        } else {
          for (double t : spec.t_us) grid.push_back({n, p.with_coherence_time(us(t)), t});
        }
      }
  }
  return grid;
}

/// Fidelity-versus-N sweep over (N, gab_ratio, g).
inline ResultTable sweep_N(const SweepSpec& spec, const DeviceParams& base) {
  SweepSpec s = spec;
  s.t_us.clear();
  return run_grid(expand(s, base), s.integrator, s.threads);
}

/// Fidelity over a (T, g) grid with gamma_phi^-1 = T, gamma_fe^-1 = T/2, gamma_eg^-1 = T.
inline ResultTable sweep_T_g(int N, const std::vector<double>& t_us, const std::vector<double>& g_mhz,
                             const DeviceParams& base, const IntegratorConfig& cfg,
                             unsigned threads = 1) {
  if (t_us.empty() || g_mhz.empty()) throw std::invalid_argument("empty sweep grid");
  SweepSpec s;
  s.n_values = {N};
  s.gab_ratios = {base.gab_ratio};
  s.g_mhz = g_mhz;
  s.t_us = t_us;
  s.integrator = cfg;
  s.threads = threads;
  return run_grid(expand(s, base), cfg, threads);
}

struct ScalarMax {
  double x;
  double f;
  int evaluations;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi]; stops
/// when the bracket is narrower than tol.
template <typename F>
ScalarMax golden_section_maximize(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_maximize: need lo < hi");
  if (!(tol > 0)) throw std::invalid_argument("golden_section_maximize: tol must be positive");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  int evals = 0;
  auto eval = [&](double x) {
    const double v = f(x);
    ++evals;
    if (!std::isfinite(v)) throw std::domain_error("golden_section_maximize: non-finite objective");
    return v;
  };
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  return fc >= fd ? ScalarMax{c, fc, evals} : ScalarMax{d, fd, evals};
}

struct GOptimum {
  double g;         // rad/s
  double fidelity;
  int evaluations;
};

/// Maximises the full-protocol fidelity over g in [g_lo, g_hi] (rad/s).
inline GOptimum optimize_g(int N, double g_lo, double g_hi, double tol, const DeviceParams& base,
                           const IntegratorConfig& cfg) {
  if (!(g_lo > 0) || !(g_hi > g_lo)) throw parameter_error("optimize_g: bad bounds");
  auto f = [&](double g) {
    DeviceParams p = base;
    p.g = g;
    const SimResult r = run_protocol(N, p, cfg, RunMode::full);
    return fidelity(r.rho_final, ideal_noon_state(N, r.rho_final.space));
  };
  const ScalarMax m = golden_section_maximize(f, g_lo, g_hi, tol);
  return {m.x, m.f, m.evaluations};
}

// ---- CSV -------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "n,gab_ratio,g_mhz,t_us,fidelity,tau_ns,trace_drift,min_eig";

inline std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_csv(std::ostream& os, const ResultTable& rows, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << fmt9(r.gab_ratio) << ',' << fmt9(r.g_mhz) << ',' << fmt9(r.t_us) << ','
       << fmt9(r.fidelity) << ',' << fmt9(r.tau_ns) << ',' << fmt9(r.trace_drift) << ','
       << fmt9(r.min_eig) << '\n';
  }
}

}  // namespace noon
