// Master-equation integration for the protocol segments.
//
//   drho/dt = -i[H(t), rho] + sum_k r_k (L rho L^+ - L^+L rho/2 - rho L^+L/2)
//             + sum_{S in {|f><f|, |e><e|}} gamma_phi,S (S rho S - S rho/2 - rho S/2)
//
// evolve_segment uses fixed-step RK4 on a sparse representation of H(t) and
// the jump operators. lindblad_rhs is the dense reference form, and
// propagate_expm_oracle exponentiates the vectorised Liouvillian; neither
// shares code with the RK4 path.
#pragma once

#include "noon/device.hpp"
#include "noon/hamiltonian.hpp"
#include "noon/qspace.hpp"

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace noon {

struct integration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ChannelKind { decay, dephasing };

struct CollapseChannel {
  std::string name;
  ChannelKind kind;
  Operator op;  // lowering operator for decay, projector for dephasing
  double rate;  // 1/s
};

using CollapseSet = std::vector<CollapseChannel>;

inline CollapseSet make_collapse_set(HilbertSpace space, const DeviceParams& p) {
  const Ops o(space);
  CollapseSet c;
  c.push_back({"kappa_a", ChannelKind::decay, o.a, p.kappa_a});
  c.push_back({"kappa_b", ChannelKind::decay, o.b, p.kappa_b});
  c.push_back({"gamma_fe", ChannelKind::decay, o.s_fe, p.gamma_fe});
  c.push_back({"gamma_eg", ChannelKind::decay, o.s_eg, p.gamma_eg});
  c.push_back({"gamma_phi_f", ChannelKind::dephasing, o.p_f, p.gamma_phi_f});
  c.push_back({"gamma_phi_e", ChannelKind::dephasing, o.p_e, p.gamma_phi_e});
  for (const auto& ch : c)
    if (!(ch.rate >= 0)) throw parameter_error("collapse rate must be >= 0: " + ch.name);
  return c;
}

struct IntegratorConfig {
  double dt_max = 1e-9;                // s
  int samples_per_fastest_period = 40;
  double hard_dt_floor = 1e-15;        // s
  int record_stride = 0;               // 0: sample diagnostics at segment ends only

  void validate() const {
    if (samples_per_fastest_period < 20)
      throw parameter_error("samples_per_fastest_period must be >= 20");
    if (!(dt_max > 0)) throw parameter_error("dt_max must be positive");
    if (!(hard_dt_floor > 0)) throw parameter_error("hard_dt_floor must be positive");
    if (record_stride < 0) throw parameter_error("record_stride must be >= 0");
  }
};

struct SegmentDiagnostics {
  std::string id;
  int steps = 0;
  double dt = 0.0;
  double trace_drift = 0.0;       // |tr rho_end - tr rho_start| before renormalisation
  double min_eigenvalue = 0.0;    // smallest over recorded samples
  double top_population_a = 0.0;  // population of the highest kept Fock level
  double top_population_b = 0.0;
};

/// Dense reference right-hand side at a fixed Hamiltonian.
inline Matrix lindblad_rhs(const Operator& h, const DensityMatrix& rho, const CollapseSet& c) {
  require_same(h.space, rho.space, "lindblad_rhs");
  const Matrix& r = rho.m;
  Matrix out = -I * (h.m * r - r * h.m);
  for (const auto& ch : c) {
    require_same(ch.op.space, rho.space, "lindblad_rhs collapse");
    if (ch.rate == 0.0) continue;
    const Matrix& s = ch.op.m;
    if (ch.kind == ChannelKind::dephasing) {
      out += ch.rate * (s * r * s - 0.5 * s * r - 0.5 * r * s);
    } else {
      const Matrix sds = s.adjoint() * s;
      out += ch.rate * (s * r * s.adjoint() - 0.5 * sds * r - 0.5 * r * sds);
    }
  }
  return out;
}

struct StepPlan {
  int steps;
  double dt;
};

/// dt = min(dt_max, 2 pi / (samples * nu_max), duration / 100), then shrunk so
/// an integer number of steps covers the duration exactly.
inline StepPlan plan_steps(double nu_max, double duration, const IntegratorConfig& cfg) {
  if (duration <= 0) return {0, 0.0};
  double dt = std::min(cfg.dt_max, duration / 100.0);
  if (nu_max > 0) dt = std::min(dt, kTwoPi / (cfg.samples_per_fastest_period * nu_max));
  dt = std::max(dt, std::min(cfg.hard_dt_floor, duration));
  const double n = std::ceil(duration / dt - 1e-9);
  if (n > static_cast<double>(std::numeric_limits<int>::max()))
    throw integration_error("step count overflow");
  const int steps = std::max(1, static_cast<int>(n));
  return {steps, duration / steps};
}

namespace detail {

template <int Order>
using Sparse = Eigen::SparseMatrix<cplx, Order>;
using SpMat = Sparse<Eigen::ColMajor>;

template <int Order = Eigen::ColMajor>
inline Sparse<Order> to_sparse(const Matrix& m) {
  Sparse<Order> s = m.sparseView(cplx(1.0), 1e-300);
  s.makeCompressed();
  return s;
}

/// Effective generator K(t) = H(t) - (i/2) sum r L^+L, or its adjoint, kept
/// on one fixed sparsity pattern so re-evaluation only rewrites values.
template <int Order>
class SparseGenerator {
 public:
  SparseGenerator(const TimeDepOperator& h, const CollapseSet* c, bool adjoint = false) {
    Matrix base = h.static_part.m;
    if (c != nullptr)
      for (const auto& ch : *c)
        if (ch.rate != 0.0) base += (-0.5 * I * ch.rate) * (ch.op.m.adjoint() * ch.op.m);
    // the rotating part is Hermitian, so only the static part changes under adjoint
    if (adjoint) base = base.adjoint().eval();

    Matrix structure = base.cwiseAbs().cast<cplx>();
    for (const auto& t : h.terms) {
      structure += t.op.m.cwiseAbs().cast<cplx>();
      structure += t.op.m.adjoint().cwiseAbs().cast<cplx>();
    }
    pattern_ = to_sparse<Order>(structure);
    base_ = gather(base);
    for (const auto& t : h.terms)
      terms_.push_back({gather(t.op.m), gather(t.op.m.adjoint()), t.freq, t.phase});
  }

  const Sparse<Order>& at(double t) {
    cplx* v = pattern_.valuePtr();
    const std::size_t nnz = base_.size();
    std::copy(base_.begin(), base_.end(), v);
    for (const auto& term : terms_) {
      const cplx c = std::exp(I * (term.freq * t + term.phase));
      const cplx cc = std::conj(c);
      for (std::size_t k = 0; k < nnz; ++k) v[k] += c * term.fwd[k] + cc * term.bwd[k];
    }
    return pattern_;
  }

 private:
  struct Term {
    std::vector<cplx> fwd, bwd;
    double freq, phase;
  };

  std::vector<cplx> gather(const Matrix& m) const {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(pattern_.nonZeros()));
    for (Eigen::Index r = 0; r < pattern_.outerSize(); ++r)
      for (typename Sparse<Order>::InnerIterator it(pattern_, r); it; ++it)
        out.push_back(m(it.row(), it.col()));
    return out;
  }

  Sparse<Order> pattern_;
  std::vector<cplx> base_;
  std::vector<Term> terms_;
};

struct Jump {
  SpMat adj;  // sqrt(rate) * L^+
};

inline std::vector<Jump> make_jumps(const CollapseSet& c) {
  std::vector<Jump> out;
  for (const auto& ch : c) {
    if (ch.rate == 0.0) continue;
    out.push_back({to_sparse(std::sqrt(ch.rate) * ch.op.m.adjoint())});
  }
  return out;
}

/// out = -iK rho + (-iK rho)^+ + sum J rho J^+ given kdag = K^+, assuming rho
/// Hermitian. Everything is dense * sparse so the inner loops run down
/// contiguous columns: K rho = (rho K^+)^+ and J rho = (rho J^+)^+.
inline void sparse_rhs(const SpMat& kdag, const std::vector<Jump>& jumps, const Matrix& rho,
                       Matrix& x, Matrix& y, Matrix& out) {
  x.noalias() = rho * kdag;
  x *= I;
  out = x + x.adjoint();
  for (const auto& j : jumps) {
    y.noalias() = rho * j.adj;
    x = y.adjoint();
    out.noalias() += x * j.adj;
  }
}

inline void sample(const Matrix& rho, HilbertSpace space, SegmentDiagnostics& d, bool first) {
  const DensityMatrix dm(space, rho);
  const double me = dm.min_eigenvalue();
  d.min_eigenvalue = first ? me : std::min(d.min_eigenvalue, me);
  d.top_population_a = std::max(d.top_population_a, top_level_population(dm, Slot::res_a));
  d.top_population_b = std::max(d.top_population_b, top_level_population(dm, Slot::res_b));
}

}  // namespace detail

/// Integrates one protocol segment. `t0` is the stage-local clock at the
/// segment start; rotating phases are evaluated at t0 + elapsed.
inline DensityMatrix evolve_segment(const TimeDepOperator& h, const DensityMatrix& rho0,
                                    const CollapseSet& c, double t0, double duration,
                                    const IntegratorConfig& cfg,
                                    SegmentDiagnostics* diag = nullptr,
                                    const std::string& segment_id = "segment") {
  require_same(h.space(), rho0.space, "evolve_segment");
  for (const auto& ch : c) require_same(ch.op.space, rho0.space, "evolve_segment collapse");
  if (duration < 0) throw parameter_error("evolve_segment: negative duration");
  cfg.validate();

  SegmentDiagnostics local;
  SegmentDiagnostics& d = diag != nullptr ? *diag : local;
  d = SegmentDiagnostics{};
  d.id = segment_id;

  const HilbertSpace space = rho0.space;
  const StepPlan plan = plan_steps(h.max_frequency(), duration, cfg);
  d.steps = plan.steps;
  d.dt = plan.dt;
  if (plan.steps == 0) {
    detail::sample(rho0.m, space, d, true);
    return rho0;
  }

  detail::SparseGenerator<Eigen::ColMajor> gen(h, &c, true);
  const auto jumps = detail::make_jumps(c);
  const int n = rho0.space.total_dim();
  Matrix rho = rho0.m;
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n), x(n, n), y(n, n);
  const double dt = plan.dt;
  const double tr0 = rho.trace().real();
  bool first_sample = true;

  for (int s = 0; s < plan.steps; ++s) {
    const double t = t0 + s * dt;
    detail::sparse_rhs(gen.at(t), jumps, rho, x, y, k1);
    tmp = rho + (0.5 * dt) * k1;
    const auto& kmid = gen.at(t + 0.5 * dt);
    detail::sparse_rhs(kmid, jumps, tmp, x, y, k2);
    tmp = rho + (0.5 * dt) * k2;
    detail::sparse_rhs(kmid, jumps, tmp, x, y, k3);
    tmp = rho + dt * k3;
    detail::sparse_rhs(gen.at(t + dt), jumps, tmp, x, y, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (cfg.record_stride > 0 && (s + 1) % cfg.record_stride == 0 && s + 1 < plan.steps) {
      if (!rho.allFinite()) throw integration_error("non-finite density matrix in " + segment_id);
      detail::sample(rho, space, d, first_sample);
      first_sample = false;
    }
  }
  if (!rho.allFinite()) throw integration_error("non-finite density matrix in " + segment_id);

  const double tr1 = rho.trace().real();
  d.trace_drift = std::abs(tr1 - tr0);
  detail::sample(rho, space, d, first_sample);

  Matrix clean = 0.5 * (rho + rho.adjoint());
  clean /= clean.trace().real();
  return {space, std::move(clean)};
}

/// Vectorised Liouvillian (column stacking): vec(A X B) = (B^T kron A) vec(X).
inline Matrix liouvillian(const Operator& h, const CollapseSet& c) {
  const int n = h.space.total_dim();
  const Matrix id = Matrix::Identity(n, n);
  Matrix l = -I * (kron(id, h.m) - kron(h.m.transpose(), id));
  for (const auto& ch : c) {
    require_same(ch.op.space, h.space, "liouvillian collapse");
    if (ch.rate == 0.0) continue;
    const Matrix& s = ch.op.m;
    const Matrix sds = s.adjoint() * s;
    l += ch.rate * (kron(s.conjugate(), s) - 0.5 * kron(id, sds) - 0.5 * kron(sds.transpose(), id));
  }
  return l;
}

inline constexpr int kOracleMaxDim = 30;

/// Exact propagation for a static Hamiltonian via exp(L t) on vec(rho).
inline DensityMatrix propagate_expm_oracle(const TimeDepOperator& h, const DensityMatrix& rho0,
                                           const CollapseSet& c, double duration) {
  require_same(h.space(), rho0.space, "propagate_expm_oracle");
  if (!h.is_static()) throw std::invalid_argument("propagate_expm_oracle: rotating terms present");
  const int n = rho0.space.total_dim();
  if (n > kOracleMaxDim) throw dimension_error("propagate_expm_oracle: dimension too large");
  if (duration < 0) throw parameter_error("propagate_expm_oracle: negative duration");
  const Matrix l = liouvillian(h.static_part, c);
  const Matrix prop = (l * duration).exp();
  const Vector v = Eigen::Map<const Vector>(rho0.m.data(), n * n);
  const Vector w = prop * v;
  return {rho0.space, Eigen::Map<const Matrix>(w.data(), n, n)};
}

/// Schroedinger-equation counterpart of evolve_segment (same step rule).
inline Ket unitary_evolve(const TimeDepOperator& h, const Ket& psi0, double t0, double duration,
                          const IntegratorConfig& cfg) {
  require_same(h.space(), psi0.space, "unitary_evolve");
  if (duration < 0) throw parameter_error("unitary_evolve: negative duration");
  cfg.validate();
  const StepPlan plan = plan_steps(h.max_frequency(), duration, cfg);
  if (plan.steps == 0) return psi0;

  detail::SparseGenerator<Eigen::RowMajor> gen(h, nullptr);
  Vector psi = psi0.amplitudes;
  const double dt = plan.dt;
  for (int s = 0; s < plan.steps; ++s) {
    const double t = t0 + s * dt;
    const Vector k1 = -I * (gen.at(t) * psi);
    const auto& hm = gen.at(t + 0.5 * dt);
    const Vector k2 = -I * (hm * (psi + 0.5 * dt * k1));
    const Vector k3 = -I * (hm * (psi + 0.5 * dt * k2));
    const Vector k4 = -I * (gen.at(t + dt) * (psi + dt * k3));
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!psi.allFinite()) throw integration_error("unitary_evolve: non-finite state");
  return {psi0.space, std::move(psi)};
}

}  // namespace noon
