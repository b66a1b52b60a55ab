// Interaction-picture Hamiltonians of the four kinds of protocol step, written
// as a static Hermitian part plus terms op * exp(i (nu t + phase)) + h.c.
#pragma once

#include "noon/device.hpp"
#include "noon/qspace.hpp"

#include <cmath>
#include <vector>

namespace noon {

struct RotatingTerm {
  Operator op;  // non-Hermitian half; the conjugate is added on evaluation
  double freq;  // rad/s
  double phase = 0.0;
};

struct TimeDepOperator {
  Operator static_part;
  std::vector<RotatingTerm> terms;

  explicit TimeDepOperator(HilbertSpace s) : static_part(Operator::zero(s)) {}

  const HilbertSpace& space() const { return static_part.space; }
  bool is_static() const { return terms.empty(); }

  /// Largest |freq| over the rotating terms, 0 when static.
  double max_frequency() const {
    double nu = 0.0;
    for (const auto& t : terms) nu = std::max(nu, std::abs(t.freq));
    return nu;
  }

  /// Adds c * op + h.c. to the static part.
  void add_static(const Operator& op, cplx c = 1.0) {
    const Operator x = c * op;
    static_part += x;
    static_part += x.adjoint();
  }
  void add_rotating(const Operator& op, double coupling, double freq, double phase = 0.0) {
    require_same(op.space, space(), "add_rotating");
    if (coupling == 0.0) return;
    terms.push_back({coupling * op, freq, phase});
  }
  void append(const TimeDepOperator& other) {
    static_part += other.static_part;
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  }
};

inline Operator evaluate(const TimeDepOperator& h, double t) {
  Operator out = h.static_part;
  for (const auto& term : h.terms) {
    const cplx c = std::exp(I * (term.freq * t + term.phase));
    out.m += c * term.op.m;
    out.m += std::conj(c) * term.op.m.adjoint();
  }
  return out;
}

namespace detail {
inline void require_space(const Ops& ops, HilbertSpace space) {
  require_same(ops.space, space, "hamiltonian builder");
}
}  // namespace detail

/// Resonator a resonant with g<->e, with every unwanted coupling of that
/// configuration rotating at its detuning.
inline TimeDepOperator h_stage1_resonant(HilbertSpace space, const DerivedCouplings& d) {
  const Ops o(space);
  TimeDepOperator h(space);
  const Operator raise_eg = o.s_eg.adjoint();  // |e><g|
  const Operator raise_fe = o.s_fe.adjoint();  // |f><e|
  h.add_static(o.a * raise_eg, d.g_eg);
  h.add_rotating(o.a * raise_fe, d.gt_fe, d.delta1);
  h.add_rotating(o.b * raise_eg, d.mu_eg, d.delta_eg);
  h.add_rotating(o.b * raise_fe, d.mu_fe, d.delta_fe);
  h.add_rotating(o.a * o.b.adjoint(), d.g_ab, d.Delta);
  return h;
}

/// Stage-1 g<->e pulse {omega_eg, -pi/2}. When `with_resonators` is false the
/// qutrit-resonator part is dropped (ideal pulse).
inline TimeDepOperator h_stage1_pulse(HilbertSpace space, const DerivedCouplings& d,
                                      bool with_resonators = true) {
  const Ops o(space);
  TimeDepOperator h(space);
  h.add_static(o.s_eg, d.Omega_eg * std::exp(-I * kPi / 2.0));
  h.add_rotating(o.s_fe, d.Omegat_fe, -d.delta2, -kPi / 2.0);
  if (with_resonators) h.append(h_stage1_resonant(space, d));
  return h;
}

/// Resonator b resonant with e<->f.
inline TimeDepOperator h_stage2_resonant(HilbertSpace space, const DerivedCouplings& d) {
  const Ops o(space);
  TimeDepOperator h(space);
  const Operator raise_eg = o.s_eg.adjoint();
  const Operator raise_fe = o.s_fe.adjoint();
  h.add_static(o.b * raise_fe, d.g_fe);
  h.add_rotating(o.b * raise_eg, d.gt_eg, d.delta3);
  h.add_rotating(o.a * raise_eg, d.mut_eg, d.deltat_eg);
  h.add_rotating(o.a * raise_fe, d.mut_fe, d.deltat_fe);
  h.add_rotating(o.a * o.b.adjoint(), d.g_ab, d.Delta);
  return h;
}

enum class PulseTransition { fe, eg };

/// Stage-2 pulses. `fe` pumps e->f at omega'_fe with the g<->e spectator at
/// -delta4; `eg` pumps g->e at omega'_eg with the e<->f spectator at +delta4.
inline TimeDepOperator h_stage2_pulse(HilbertSpace space, const DerivedCouplings& d,
                                      PulseTransition which, bool with_resonators = true) {
  const Ops o(space);
  TimeDepOperator h(space);
  const cplx phase = std::exp(-I * kPi / 2.0);
  switch (which) {
    case PulseTransition::fe:
      h.add_static(o.s_fe, d.Omega_fe * phase);
      h.add_rotating(o.s_eg, d.Omegat_eg, -d.delta4, -kPi / 2.0);
      break;
    case PulseTransition::eg:
      h.add_static(o.s_eg, d.Omega_eg * phase);
      h.add_rotating(o.s_fe, d.Omegat_fe, d.delta4, -kPi / 2.0);
      break;
    default:
      throw std::invalid_argument("h_stage2_pulse: invalid transition");
  }
  if (with_resonators) h.append(h_stage2_resonant(space, d));
  return h;
}

/// Schroedinger-picture Hamiltonian of the stage-1 ideal configuration,
/// split as H0 (free) + H_int (a coupled to g<->e).
struct LabFrame {
  Operator h0;
  Operator h_int;
  Operator total() const { return h0 + h_int; }
};

inline LabFrame h_lab_frame(HilbertSpace space, const DerivedCouplings& d) {
  const Ops o(space);
  // E_g = 0, E_e = omega_eg, E_f = omega_eg + omega_fe
  Operator h0 = d.omega_eg * o.p_e + (d.omega_eg + d.omega_fe) * o.p_f;
  h0 += d.omega_a * (o.a.adjoint() * o.a);
  h0 += d.omega_b * (o.b.adjoint() * o.b);
  Operator h_int = d.g_eg * (o.a.adjoint() * o.s_eg);
  h_int += h_int.adjoint();
  return {std::move(h0), std::move(h_int)};
}

/// Unitary exp(-i H t) for a Hermitian H, via its eigendecomposition.
inline Matrix unitary_of(const Operator& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.m);
  const Eigen::VectorXd& ev = es.eigenvalues();
  Vector phases(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) phases(k) = std::exp(-I * ev(k) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace noon
