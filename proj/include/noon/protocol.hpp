// The 2N-step NOON-state procedure: schedule construction, the ideal state
// ladder, and a driver that pushes a density matrix through the schedule.
#pragma once

#include "noon/device.hpp"
#include "noon/hamiltonian.hpp"
#include "noon/lindblad.hpp"
#include "noon/qspace.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace noon {

struct truncation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class SegmentKind {
  swap_a_ge,        // resonator a resonant with g<->e
  pulse_eg_stage1,  // {omega_eg, -pi/2, pi/(2 Omega_eg)}
  swap_b_fe,        // resonator b resonant with e<->f
  pulse_fe_stage2,  // {omega'_fe, -pi/2, pi/(2 Omega_fe)}
  pulse_eg_stage2,  // {omega'_eg, -pi/2, pi/(2 Omega_eg)}
  retune_idle,      // level-spacing adjustment, no coherent drive
};

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::swap_a_ge: return "swap_a_ge";
    case SegmentKind::pulse_eg_stage1: return "pulse_eg_stage1";
    case SegmentKind::swap_b_fe: return "swap_b_fe";
    case SegmentKind::pulse_fe_stage2: return "pulse_fe_stage2";
    case SegmentKind::pulse_eg_stage2: return "pulse_eg_stage2";
    case SegmentKind::retune_idle: return "retune_idle";
  }
  return "?";
}

struct Segment {
  SegmentKind kind;
  double duration;     // s
  int stage;           // 1 or 2; idles carry the stage they precede/follow
  int step_index;      // 1..N, 0 for idles
  double clock_start;  // stage-local clock at segment start (s)

  std::string id() const {
    return std::string(to_string(kind)) + "[stage " + std::to_string(stage) + ", step " +
           std::to_string(step_index) + "]";
  }
};

struct Schedule {
  int N;
  std::vector<Segment> segments;

  double total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration;
    return t;
  }
};

inline Schedule build_schedule(int N, const DerivedCouplings& d, const DeviceParams& p) {
  if (N < 1) throw parameter_error("build_schedule: N must be >= 1");
  Schedule sch{N, {}};
  auto& seg = sch.segments;
  const double pulse_eg = kPi / (2.0 * d.Omega_eg);
  const double pulse_fe = kPi / (2.0 * d.Omega_fe);
  auto swap_time = [](int j, double coupling) {
    return kPi / (2.0 * std::sqrt(static_cast<double>(j)) * coupling);
  };

  seg.push_back({SegmentKind::retune_idle, p.t_d, 1, 0, 0.0});
  double clock = 0.0;
  for (int j = 1; j <= N; ++j) {
    const double ts = swap_time(j, d.g_eg);
    seg.push_back({SegmentKind::swap_a_ge, ts, 1, j, clock});
    clock += ts;
    if (j < N) {
      seg.push_back({SegmentKind::pulse_eg_stage1, pulse_eg, 1, j, clock});
      clock += pulse_eg;
    }
  }
  seg.push_back({SegmentKind::retune_idle, p.t_d, 2, 0, 0.0});
  clock = 0.0;
  for (int j = 1; j < N; ++j) {
    const double ts = swap_time(j, d.g_fe);
    seg.push_back({SegmentKind::swap_b_fe, ts, 2, j, clock});
    clock += ts;
    seg.push_back({SegmentKind::pulse_fe_stage2, pulse_fe, 2, j, clock});
    clock += pulse_fe;
  }
  seg.push_back({SegmentKind::pulse_eg_stage2, pulse_eg, 2, N, clock});
  clock += pulse_eg;
  seg.push_back({SegmentKind::swap_b_fe, swap_time(N, d.g_fe), 2, N, clock});
  seg.push_back({SegmentKind::retune_idle, p.t_d, 2, 0, 0.0});
  return sch;
}

/// Resonator dimension used for an N-photon run: N + 1 + guard levels.
inline HilbertSpace protocol_space(int N, int n_guard) {
  if (N < 1) throw parameter_error("N must be >= 1");
  return {N + 1 + n_guard, N + 1 + n_guard};
}

inline cplx minus_i_pow(int k) {
  constexpr cplx table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return table[((k % 4) + 4) % 4];
}

inline Ket ideal_noon_state(int N, HilbertSpace space) {
  if (N < 1) throw parameter_error("ideal_noon_state: N must be >= 1");
  if (N > space.dim_a() - 1 || N > space.dim_b() - 1)
    throw truncation_error("ideal_noon_state: N exceeds resonator truncation");
  Vector v = Vector::Zero(space.total_dim());
  const cplx amp = minus_i_pow(N) / std::sqrt(2.0);
  v(space.flatten(Level::e, 0, N)) += amp;
  v(space.flatten(Level::e, N, 0)) += amp;
  return {space, std::move(v)};
}

/// Named states of the ideal ladder, by the point in the schedule they follow.
enum class Checkpoint {
  stage1_swap1,       // after stage-1 step-1 swap
  stage1_pulse1,      // after its pulse (N >= 2)
  stage1_step_nm1,    // after stage-1 step N-1 (N >= 2)
  stage1_step_n,      // after stage-1 step N
  stage2_swap1,       // after stage-2 step-1 swap (N >= 2)
  stage2_pulse1,      // after its pulse (N >= 2)
  stage2_step_nm1,    // after stage-2 step N-1 (N >= 2)
};

inline constexpr Checkpoint kAllCheckpoints[] = {
    Checkpoint::stage1_swap1,  Checkpoint::stage1_pulse1, Checkpoint::stage1_step_nm1,
    Checkpoint::stage1_step_n, Checkpoint::stage2_swap1,  Checkpoint::stage2_pulse1,
    Checkpoint::stage2_step_nm1};

inline const char* to_string(Checkpoint c) {
  switch (c) {
    case Checkpoint::stage1_swap1: return "stage1_swap1";
    case Checkpoint::stage1_pulse1: return "stage1_pulse1";
    case Checkpoint::stage1_step_nm1: return "stage1_step_nm1";
    case Checkpoint::stage1_step_n: return "stage1_step_n";
    case Checkpoint::stage2_swap1: return "stage2_swap1";
    case Checkpoint::stage2_pulse1: return "stage2_pulse1";
    case Checkpoint::stage2_step_nm1: return "stage2_step_nm1";
  }
  return "?";
}

inline bool checkpoint_valid(int N, Checkpoint c) {
  if (N < 1) return false;
  return c == Checkpoint::stage1_swap1 || c == Checkpoint::stage1_step_n || N >= 2;
}

inline Ket ideal_intermediate_state(int N, Checkpoint c, HilbertSpace space) {
  if (!checkpoint_valid(N, c))
    throw std::invalid_argument(std::string("checkpoint ") + to_string(c) +
                                " is not defined for N = " + std::to_string(N));
  if (N > space.dim_a() - 1 || N > space.dim_b() - 1)
    throw truncation_error("ideal_intermediate_state: N exceeds resonator truncation");
  const double r = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(space.total_dim());
  auto put = [&](Level q, int na, int nb, cplx amp) { v(space.flatten(q, na, nb)) += r * amp; };
  switch (c) {
    case Checkpoint::stage1_swap1:
      put(Level::f, 0, 0, 1.0);
      put(Level::g, 1, 0, -I);
      break;
    case Checkpoint::stage1_pulse1:
      put(Level::f, 0, 0, 1.0);
      put(Level::e, 1, 0, -I);
      break;
    case Checkpoint::stage1_step_nm1:
      put(Level::f, 0, 0, 1.0);
      put(Level::e, N - 1, 0, minus_i_pow(N - 1));
      break;
    case Checkpoint::stage1_step_n:
      put(Level::f, 0, 0, 1.0);
      put(Level::g, N, 0, minus_i_pow(N));
      break;
    case Checkpoint::stage2_swap1:
      put(Level::e, 0, 1, -I);
      put(Level::g, N, 0, minus_i_pow(N));
      break;
    case Checkpoint::stage2_pulse1:
      put(Level::f, 0, 1, -I);
      put(Level::g, N, 0, minus_i_pow(N));
      break;
    case Checkpoint::stage2_step_nm1:
      put(Level::f, 0, N - 1, minus_i_pow(N - 1));
      put(Level::g, N, 0, minus_i_pow(N));
      break;
  }
  return {space, std::move(v)};
}

/// Index of the segment after which the checkpoint state is reached.
inline std::size_t checkpoint_segment(const Schedule& s, Checkpoint c) {
  const int N = s.N;
  if (!checkpoint_valid(N, c)) throw std::invalid_argument("checkpoint not defined for this N");
  auto find = [&](SegmentKind k, int stage, int step) -> std::size_t {
    for (std::size_t i = 0; i < s.segments.size(); ++i) {
      const auto& g = s.segments[i];
      if (g.kind == k && g.stage == stage && g.step_index == step) return i;
    }
    throw std::logic_error("checkpoint segment missing from schedule");
  };
  switch (c) {
    case Checkpoint::stage1_swap1: return find(SegmentKind::swap_a_ge, 1, 1);
    case Checkpoint::stage1_pulse1: return find(SegmentKind::pulse_eg_stage1, 1, 1);
    case Checkpoint::stage1_step_nm1: return find(SegmentKind::pulse_eg_stage1, 1, N - 1);
    case Checkpoint::stage1_step_n: return find(SegmentKind::swap_a_ge, 1, N);
    case Checkpoint::stage2_swap1: return find(SegmentKind::swap_b_fe, 2, 1);
    case Checkpoint::stage2_pulse1: return find(SegmentKind::pulse_fe_stage2, 2, 1);
    case Checkpoint::stage2_step_nm1: return find(SegmentKind::pulse_fe_stage2, 2, N - 1);
  }
  throw std::logic_error("bad checkpoint");
}

inline Ket initial_state(HilbertSpace space) {
  Vector v = Vector::Zero(space.total_dim());
  v(space.flatten(Level::f, 0, 0)) = 1.0 / std::sqrt(2.0);
  v(space.flatten(Level::e, 0, 0)) = 1.0 / std::sqrt(2.0);
  return {space, std::move(v)};
}

enum class RunMode { full, ideal };

inline const char* to_string(RunMode m) { return m == RunMode::full ? "full" : "ideal"; }

/// Hamiltonian governing a segment. Ideal mode drops every unwanted term,
/// including the resonator couplings during pulses.
inline TimeDepOperator segment_hamiltonian(const Segment& seg, HilbertSpace space,
                                           const DerivedCouplings& d, RunMode mode) {
  const bool full = mode == RunMode::full;
  const DerivedCouplings dc = full ? d : ideal_couplings(d);
  switch (seg.kind) {
    case SegmentKind::swap_a_ge: return h_stage1_resonant(space, dc);
    case SegmentKind::pulse_eg_stage1: return h_stage1_pulse(space, dc, full);
    case SegmentKind::swap_b_fe: return h_stage2_resonant(space, dc);
    case SegmentKind::pulse_fe_stage2: return h_stage2_pulse(space, dc, PulseTransition::fe, full);
    case SegmentKind::pulse_eg_stage2: return h_stage2_pulse(space, dc, PulseTransition::eg, full);
    case SegmentKind::retune_idle: return TimeDepOperator(space);
  }
  throw std::logic_error("bad segment kind");
}

struct SimResult {
  DensityMatrix rho_final;
  Schedule schedule;
  std::vector<SegmentDiagnostics> segments;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double top_population_a = 0.0;
  double top_population_b = 0.0;
  double wall_seconds = 0.0;

  /// Physicality thresholds shared by the CLI exit code and the acceptance suite.
  bool physical(double drift_tol = 1e-6, double eig_tol = -1e-6, double top_tol = 1e-3) const {
    return max_trace_drift < drift_tol && min_eigenvalue > eig_tol &&
           top_population_a < top_tol && top_population_b < top_tol;
  }
};

using SegmentObserver = std::function<void(std::size_t, const Segment&, const DensityMatrix&)>;

inline SimResult run_protocol(int N, const DeviceParams& params, const IntegratorConfig& cfg,
                              RunMode mode, const SegmentObserver& observer = {}) {
  const auto start = std::chrono::steady_clock::now();
  const DerivedCouplings d = derive_couplings(params);
  const HilbertSpace space = protocol_space(N, params.n_guard);
  if (space.dim_a() < N + 1 + params.n_guard || space.dim_b() < N + 1 + params.n_guard)
    throw truncation_error("run_protocol: resonator truncation too small");
  const Schedule sch = build_schedule(N, d, params);
  const DeviceParams rates = mode == RunMode::full ? params : params.without_dissipation();
  const CollapseSet c = make_collapse_set(space, rates);

  DensityMatrix rho = DensityMatrix::pure(initial_state(space));
  SimResult res{rho, sch, {}, 0.0, 1.0, 0.0, 0.0, 0.0};
  bool first = true;
  for (std::size_t i = 0; i < sch.segments.size(); ++i) {
    const Segment& seg = sch.segments[i];
    if (mode == RunMode::ideal && seg.kind == SegmentKind::retune_idle) {
      if (observer) observer(i, seg, rho);
      continue;
    }
    const TimeDepOperator h = segment_hamiltonian(seg, space, d, mode);
    SegmentDiagnostics diag;
    rho = evolve_segment(h, rho, c, seg.clock_start, seg.duration, cfg, &diag, seg.id());
    res.max_trace_drift = std::max(res.max_trace_drift, diag.trace_drift);
    res.min_eigenvalue = first ? diag.min_eigenvalue : std::min(res.min_eigenvalue, diag.min_eigenvalue);
    res.top_population_a = std::max(res.top_population_a, diag.top_population_a);
    res.top_population_b = std::max(res.top_population_b, diag.top_population_b);
    first = false;
    res.segments.push_back(std::move(diag));
    if (observer) observer(i, seg, rho);
  }
  res.rho_final = rho;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace noon
