#include "noon/hamiltonian.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace noon;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<TimeDepOperator> all_builders(HilbertSpace s, const DerivedCouplings& d) {
  return {h_stage1_resonant(s, d),
          h_stage1_pulse(s, d),
          h_stage1_pulse(s, d, false),
          h_stage2_resonant(s, d),
          h_stage2_pulse(s, d, PulseTransition::fe),
          h_stage2_pulse(s, d, PulseTransition::eg),
          h_stage2_pulse(s, d, PulseTransition::fe, false),
          h_stage2_pulse(s, d, PulseTransition::eg, false)};
}

DerivedCouplings crosstalk_couplings() {
  DeviceParams p;
  p.gab_ratio = 2.0;
  return derive_couplings(p);
}

// Lab-frame coupling written directly from the physical picture: each
// resonator couples to both qutrit transitions, plus a-b exchange.
Operator lab_coupling(const Ops& o, double ga_eg, double ga_fe, double gb_eg, double gb_fe,
                      double g_ab) {
  const Operator up_eg = o.s_eg.adjoint();
  const Operator up_fe = o.s_fe.adjoint();
  Operator h = ga_eg * (o.a * up_eg) + ga_fe * (o.a * up_fe) + gb_eg * (o.b * up_eg) +
               gb_fe * (o.b * up_fe) + g_ab * (o.a * o.b.adjoint());
  return h + h.adjoint();
}

Operator free_part(const Ops& o, double e_e, double e_f, double wa, double wb) {
  return e_e * o.p_e + e_f * o.p_f + wa * (o.a.adjoint() * o.a) + wb * (o.b.adjoint() * o.b);
}

// exp(i H0 t) V exp(-i H0 t) for diagonal H0
Matrix rotate(const Operator& h0, const Operator& v, double t) {
  const int n = h0.m.rows();
  Matrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = v.m(i, j) * std::exp(I * (h0.m(i, i).real() - h0.m(j, j).real()) * t);
  return out;
}

}  // namespace

TEST(Hamiltonian, HermitianAtRandomTimes) {
  const HilbertSpace s(4, 4);
  const DerivedCouplings d = crosstalk_couplings();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1e-6);
  for (const auto& h : all_builders(s, d))
    for (int k = 0; k < 10; ++k) {
      const Matrix m = evaluate(h, u(rng)).m;
      EXPECT_LT(max_abs(m - m.adjoint()), 1e-9 * max_abs(m));
    }
}

TEST(Hamiltonian, IdealStageOneIsJaynesCummings) {
  const HilbertSpace s(4, 3);
  const DerivedCouplings d = ideal_couplings(derive_couplings(DeviceParams{}));
  const TimeDepOperator h = h_stage1_resonant(s, d);
  EXPECT_TRUE(h.is_static());
  const Ops o(s);
  Operator expected = d.g_eg * (o.a * o.s_eg.adjoint());
  expected += expected.adjoint();
  EXPECT_LT(max_abs(h.static_part.m - expected.m), 1e-14 * d.g_eg);
}

TEST(Hamiltonian, IdealStageTwoIsJaynesCummings) {
  const HilbertSpace s(3, 4);
  const DerivedCouplings d = ideal_couplings(derive_couplings(DeviceParams{}));
  const TimeDepOperator h = h_stage2_resonant(s, d);
  EXPECT_TRUE(h.is_static());
  const Ops o(s);
  Operator expected = d.g_fe * (o.b * o.s_fe.adjoint());
  expected += expected.adjoint();
  EXPECT_LT(max_abs(h.static_part.m - expected.m), 1e-14 * d.g_eg);
}

TEST(Hamiltonian, SqrtNScalingOfSwapElements) {
  const HilbertSpace s(5, 5);
  const DerivedCouplings d = derive_couplings(DeviceParams{});
  const Matrix h1 = h_stage1_resonant(s, d).static_part.m;
  const Matrix h2 = h_stage2_resonant(s, d).static_part.m;
  for (int n = 0; n + 1 < 5; ++n) {
    EXPECT_NEAR(std::abs(h1(s.flatten(Level::e, n, 0), s.flatten(Level::g, n + 1, 0))),
                std::sqrt(n + 1.0) * d.g_eg, 1e-6);
    EXPECT_NEAR(std::abs(h2(s.flatten(Level::f, 0, n), s.flatten(Level::e, 0, n + 1))),
                std::sqrt(n + 1.0) * d.g_fe, 1e-6);
  }
}

TEST(Hamiltonian, ResonantStepsConserveExcitations) {
  const HilbertSpace s(4, 4);
  const Ops o(s);
  const Operator nexc = o.a.adjoint() * o.a + o.b.adjoint() * o.b + o.p_e + 2.0 * o.p_f;
  const DerivedCouplings d = crosstalk_couplings();
  for (const auto& h : {h_stage1_resonant(s, d), h_stage2_resonant(s, d)})
    for (double t : {0.0, 3.3e-9, 1.7e-7}) {
      const Matrix m = evaluate(h, t).m;
      EXPECT_LT(max_abs(m * nexc.m - nexc.m * m), 1e-9 * max_abs(m));
    }
}

TEST(Hamiltonian, NoDirectGToFCoupling) {
  const HilbertSpace s(3, 3);
  const DerivedCouplings d = crosstalk_couplings();
  for (const auto& h : all_builders(s, d))
    for (double t : {0.0, 1.1e-9, 2.9e-8}) {
      const Matrix m = evaluate(h, t).m;
      for (int na = 0; na < 3; ++na)
        for (int nb = 0; nb < 3; ++nb)
          for (int ma = 0; ma < 3; ++ma)
            for (int mb = 0; mb < 3; ++mb)
              EXPECT_EQ(m(s.flatten(Level::g, na, nb), s.flatten(Level::f, ma, mb)), cplx(0.0));
    }
}

TEST(Hamiltonian, StageOneMatchesLabFrameConjugation) {
  const HilbertSpace s(3, 3);
  const DerivedCouplings d = crosstalk_couplings();
  const Ops o(s);
  const Operator h0 = free_part(o, d.omega_eg, d.omega_eg + d.omega_fe, d.omega_a, d.omega_b);
  const Operator v = lab_coupling(o, d.g_eg, d.gt_fe, d.mu_eg, d.mu_fe, d.g_ab);
  const TimeDepOperator h = h_stage1_resonant(s, d);
  for (double t : {0.0, 0.37e-9, 2.1e-9, 13.7e-9, 101.3e-9}) {
    const Matrix diff = evaluate(h, t).m - rotate(h0, v, t);
    EXPECT_LT(max_abs(diff), 1e-6 * d.g_eg) << "t = " << t;
  }
}

TEST(Hamiltonian, StageTwoMatchesLabFrameConjugation) {
  const HilbertSpace s(3, 3);
  const DerivedCouplings d = crosstalk_couplings();
  const Ops o(s);
  const Operator h0 =
      free_part(o, d.omega_eg_p, d.omega_eg_p + d.omega_fe_p, d.omega_a, d.omega_b);
  const Operator v = lab_coupling(o, d.mut_eg, d.mut_fe, d.gt_eg, d.g_fe, d.g_ab);
  const TimeDepOperator h = h_stage2_resonant(s, d);
  for (double t : {0.0, 0.51e-9, 4.4e-9, 27.5e-9}) {
    const Matrix diff = evaluate(h, t).m - rotate(h0, v, t);
    EXPECT_LT(max_abs(diff), 1e-6 * d.g_eg) << "t = " << t;
  }
}

TEST(Hamiltonian, LabFrameHelperAgreesWithIdealInteractionPicture) {
  const HilbertSpace s(4, 2);
  const DerivedCouplings d = derive_couplings(DeviceParams{});
  const LabFrame lab = h_lab_frame(s, d);
  const Operator hi = h_stage1_resonant(s, ideal_couplings(d)).static_part;
  for (double t : {0.0, 1.3e-9, 7.7e-8})
    EXPECT_LT(max_abs(rotate(lab.h0, lab.h_int, t) - hi.m), 1e-6 * d.g_eg);
}

TEST(Hamiltonian, IdealPulseReductions) {
  const HilbertSpace s(3, 3);
  const Ops o(s);
  const DerivedCouplings d = ideal_couplings(derive_couplings(DeviceParams{}));
  const Operator eg = -I * (d.Omega_eg * o.s_eg) + I * (d.Omega_eg * o.s_eg.adjoint());
  const Operator fe = -I * (d.Omega_fe * o.s_fe) + I * (d.Omega_fe * o.s_fe.adjoint());

  const TimeDepOperator p1 = h_stage1_pulse(s, d, false);
  EXPECT_TRUE(p1.is_static());
  EXPECT_LT(max_abs(p1.static_part.m - eg.m), 1e-14 * d.Omega_eg);
  const TimeDepOperator pf = h_stage2_pulse(s, d, PulseTransition::fe, false);
  EXPECT_TRUE(pf.is_static());
  EXPECT_LT(max_abs(pf.static_part.m - fe.m), 1e-14 * d.Omega_fe);
  const TimeDepOperator pe = h_stage2_pulse(s, d, PulseTransition::eg, false);
  EXPECT_LT(max_abs(pe.static_part.m - eg.m), 1e-14 * d.Omega_eg);
}

TEST(Hamiltonian, PiOverTwoPulseTransfersPopulation) {
  const HilbertSpace s(2, 2);
  const DerivedCouplings d = ideal_couplings(derive_couplings(DeviceParams{}));
  const Matrix u = unitary_of(h_stage1_pulse(s, d, false).static_part, kPi / (2 * d.Omega_eg));
  EXPECT_NEAR(std::abs(u(s.flatten(Level::g, 1, 0), s.flatten(Level::e, 1, 0))), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(u(s.flatten(Level::f, 0, 1), s.flatten(Level::f, 0, 1))), 1.0, 1e-12);
  const Matrix uf =
      unitary_of(h_stage2_pulse(s, d, PulseTransition::fe, false).static_part, kPi / (2 * d.Omega_fe));
  EXPECT_NEAR(std::abs(uf(s.flatten(Level::f, 0, 0), s.flatten(Level::e, 0, 0))), 1.0, 1e-12);
}

TEST(Hamiltonian, SpectatorTermsAndFrequencies) {
  const HilbertSpace s(3, 3);
  const DerivedCouplings d = derive_couplings(DeviceParams{});
  const TimeDepOperator p1 = h_stage1_pulse(s, d, false);
  ASSERT_EQ(p1.terms.size(), 1u);
  EXPECT_DOUBLE_EQ(p1.terms[0].freq, -d.delta2);
  EXPECT_NEAR(max_abs(p1.terms[0].op.m), d.Omegat_fe, 1e-6);
  const TimeDepOperator pf = h_stage2_pulse(s, d, PulseTransition::fe, false);
  ASSERT_EQ(pf.terms.size(), 1u);
  EXPECT_DOUBLE_EQ(pf.terms[0].freq, -d.delta4);
  const TimeDepOperator pe = h_stage2_pulse(s, d, PulseTransition::eg, false);
  ASSERT_EQ(pe.terms.size(), 1u);
  EXPECT_DOUBLE_EQ(pe.terms[0].freq, d.delta4);
  EXPECT_DOUBLE_EQ(h_stage1_resonant(s, d).max_frequency(), std::abs(d.delta_eg));
}

TEST(Hamiltonian, CrosstalkOnlyWhenRequested) {
  const HilbertSpace s(3, 3);
  DeviceParams p;
  const DerivedCouplings d0 = derive_couplings(p);
  p.gab_ratio = 2.0;
  const DerivedCouplings d2 = derive_couplings(p);
  EXPECT_EQ(h_stage1_resonant(s, d2).terms.size(), h_stage1_resonant(s, d0).terms.size() + 1);
  EXPECT_NEAR(d2.g_ab, 2.0 * d2.g_eg, 1e-9);
}

TEST(Hamiltonian, SpaceMismatchThrows) {
  TimeDepOperator h(HilbertSpace(3, 3));
  EXPECT_THROW(h.add_rotating(Operator::identity(HilbertSpace(3, 4)), 1.0, 1.0), space_mismatch);
}
