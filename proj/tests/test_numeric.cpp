#include <gtest/gtest.h>

#include <cstdlib>

#include "potentials.hpp"
#include "vega/galois_k2.hpp"
#include "vega/km2.hpp"
#include "vega/numeric.hpp"
#include "vega/trig.hpp"

using namespace vega;
using namespace vega::testing;

namespace {

constexpr double pi = std::numbers::pi;

LinearSystem oscillator() {
  LinearSystem s;
  s.dim = 2;
  s.A = [](cd) {
    CMatrix a(2, 2);
    a << 0.0, 1.0, -1.0, 0.0;
    return a;
  };
  s.label = "x'' = -x";
  return s;
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<VESystem> cubic_chain() {
  auto nd = normalize_darboux(cubic_potential(1), verify_darboux(cubic_potential(1), {q(0), q(1)}));
  return build_ve_chain(nd.V, nd.data, 2);
}

// x'' = -2x with x(t0) = 1, ẋ(t0) = 0
cd source_solution(cd t, double t0) { return std::cos(std::sqrt(2.0) * (t - t0)); }

LinearSystem target_block(double lambda) {
  LinearSystem s;
  s.dim = 2;
  s.A = [lambda](cd) {
    CMatrix a(2, 2);
    a << 0.0, 1.0, -lambda, 0.0;
    return a;
  };
  s.singular_distance = distance_to_multiples_of_pi;
  return s;
}

// loop around 0 and the shift t -> t + 2π, both based at π/2
std::pair<CMatrix, CMatrix> loop_and_period(const LinearSystem& sys) {
  CMatrix m0 = monodromy_around(sys, 0.0, pi / 2).value;
  cd b = pi / 2;
  auto shift = Contour::polyline({b, b + cd(0, 1), b + 2 * pi + cd(0, 1), b + 2 * pi});
  CMatrix t = integrate_system(sys, shift).value;
  return {m0, t};
}

}  // namespace

TEST(Contour, ClosureAndAllocation) {
  auto c = Contour::circle(cd(1, 2), 0.5);
  EXPECT_TRUE(c.closed());
  EXPECT_EQ(c.pieces()[0].z(1.0), c.base());
  EXPECT_EQ(c.base(), cd(1.5, 2));
  auto p = Contour::polyline({0.0, cd(1, 0), cd(1, 1)}, 100, true);
  EXPECT_TRUE(p.closed());
  EXPECT_EQ(p.end(), p.base());
  EXPECT_EQ(p.waypoints().size(), 4u);
  auto alloc = p.allocation(100);
  EXPECT_EQ(alloc.size(), 3u);
  EXPECT_EQ(alloc[0], alloc[1]);
  EXPECT_GT(alloc[2], alloc[0]);
  EXPECT_FALSE(Contour::segment(0.0, 1.0).closed());
  EXPECT_THROW(Contour::circle(0.0, 0.0), Error);
  EXPECT_THROW(Contour::polyline({0.0}), Error);
}

TEST(Numeric, OscillatorLoopIsIdentity) {
  auto m = integrate_system(oscillator(), Contour::circle(cd(5, 1), 1.0));
  EXPECT_LT(max_abs(m.value - CMatrix::Identity(2, 2)), 1e-8);
  EXPECT_NEAR(std::abs(m.determinant() - 1.0), 0.0, 1e-10);
}

TEST(Numeric, LogDerivativeMultiplier) {
  // ż = νz/t: the multiplier around 0 is e^{2πiν}
  for (double nu : {1.0, 0.5, 0.25}) {
    LinearSystem s;
    s.dim = 1;
    s.A = [nu](cd t) { return CMatrix::Constant(1, 1, nu / t); };
    s.singular_distance = [](cd t) { return std::abs(t); };
    auto m = integrate_system(s, Contour::circle(0.0, 1.0));
    EXPECT_LT(std::abs(m.value(0, 0) - std::exp(cd(0, 2 * pi * nu))), 1e-6) << nu;
  }
}

TEST(Numeric, RungeKuttaOrder) {
  IntegrationOptions opt;
  opt.richardson = false;
  std::vector<double> errs;
  // leading errors cancel on rotation-symmetric loops, so use a 3-4-5 triangle
  auto loop = Contour::polyline({0.0, 3.0, cd(3, 4)}, 48, true);
  for (unsigned steps : {48u, 96u, 192u}) {
    opt.steps = steps;
    errs.push_back(max_abs(integrate_system(oscillator(), loop, opt).value - CMatrix::Identity(2, 2)));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
    double ratio = errs[i] / errs[i + 1];
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
  }
}

TEST(Numeric, TrigJumpMatchesClosedForm) {
  for (double w : {0.0, 1.0, -1.0, 2.0, -2.0, std::sqrt(2.0)})
    for (long long n : {0LL, 1LL}) {
      auto m = monodromy_matrix(trig_integral_system(w), n, 1.0);
      Scalar jump = monodromy_jump([w](cd t) { return std::exp(cd(0, w) * t); }, n);
      EXPECT_LT(std::abs(m.value(0, 1) - jump.to_complex()), 1e-6) << w << " " << n;
      EXPECT_LT(std::abs(m.value(0, 0) - 1.0) + std::abs(m.value(1, 0)) + std::abs(m.value(1, 1) - 1.0), 1e-12);
    }
  EXPECT_LT(std::abs(monodromy_matrix(trig_integral_system(0.0), 0, 0.5).value(0, 1) - cd(0, 2 * pi)), 1e-6);
}

TEST(Numeric, DoubleLoopIsSquare) {
  auto lin = linearize_ve(extract_ve2_alpha(cubic_chain(), 0, 0));
  CMatrix m1 = monodromy_matrix(lin.system, 0, 1.0).value;
  CMatrix m2 = monodromy_matrix(lin.system, 0, 1.0, {}, 2).value;
  EXPECT_GT(max_abs(m1 - CMatrix::Identity(m1.rows(), m1.cols())), 1e-3);
  EXPECT_LT(max_abs(m2 - m1 * m1), 1e-6);
  CMatrix trig1 = monodromy_matrix(trig_integral_system(std::sqrt(2.0)), 1, 2.0).value;
  CMatrix trig2 = monodromy_matrix(trig_integral_system(std::sqrt(2.0)), 1, 2.0, {}, 2).value;
  EXPECT_LT(max_abs(trig2 - trig1 * trig1), 1e-6);
}

TEST(Numeric, ZeroCouplingGivesBlockDiagonalMonodromy) {
  auto V = diagonal_oscillator({1, 2});
  auto data = verify_darboux(V, {q(1), q(0)});
  auto chain = build_ve_chain(V, data, 2);
  auto lin = linearize_ve(extract_ve2_alpha(chain, 1, 0));
  CMatrix m = monodromy_matrix(lin.system, 0, 1.0).value;
  CMatrix ve1 = monodromy_matrix(linearize_ve(chain[0]).system, 0, 1.0).value;
  std::size_t zt = lin.target_offset;
  EXPECT_LT(max_abs(m.block(zt, 0, 2, zt)), 1e-12);
  EXPECT_LT(max_abs(m.block(0, zt, zt, 2)), 1e-12);
  EXPECT_LT(max_abs(m.block(0, 0, 2, 2) - ve1.block(2, 2, 2, 2)), 1e-8);
  EXPECT_LT(max_abs(m.block(zt, zt, 2, 2) - ve1.block(0, 0, 2, 2)), 1e-8);
}

TEST(Numeric, VariationOfConstantsMatchesDirectIntegration) {
  auto ve2 = extract_ve2_alpha(cubic_chain(), 0, 0);
  ASSERT_EQ(ve2.forcing.size(), 1u);
  double theta = ve2.forcing[0].coefficient.to_complex().real();
  EXPECT_EQ(theta, -6.0);
  double lambda = ve2.eigenvalues[0].to_complex().real();
  EXPECT_EQ(lambda, 2.0);
  double t0 = 0.5;
  auto path = Contour::segment(t0, 2.5, 2048);
  auto b = [&](cd t) {
    CVector v(2);
    v << 0.0, theta * std::pow(source_solution(t, t0), 2) / std::sin(t);
    return v;
  };
  auto voc = variation_of_constants(target_block(lambda), b, path);
  auto direct = integrate_path(forced_system(target_block(lambda), b), path, CVector::Zero(2));
  auto lin = linearize_ve(ve2);
  auto full = integrate_path(as_first_order(lin.system), path, linearized_initial_state(lin, {1.0, 0.0}, {0.0, 0.0}));
  ASSERT_EQ(voc.states.size(), direct.states.size());
  ASSERT_EQ(full.states.size(), direct.states.size());
  double worst = 0, worst_lin = 0;
  for (std::size_t i = 0; i < direct.states.size(); ++i) {
    worst = std::max(worst, (voc.states[i] - direct.states[i]).cwiseAbs().maxCoeff());
    worst_lin = std::max(worst_lin, (full.states[i].segment(lin.target_index(0), 2) - direct.states[i]).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-7);
  EXPECT_LT(worst_lin, 1e-7);
  EXPECT_GT(direct.states.back().cwiseAbs().maxCoeff(), 1e-2);
}

TEST(Numeric, SampledResidualOfLinearizedSystem) {
  auto ve2 = extract_ve2_alpha(cubic_chain(), 0, 0);
  auto lin = linearize_ve(ve2);
  auto path = Contour::segment(0.5, 2.5, 4096);
  auto sol = integrate_path(as_first_order(lin.system), path, linearized_initial_state(lin, {1.0, 0.0}, {0.0, 0.0}));
  PhiFn phi = phi_function(2);
  std::size_t zi = lin.target_index(0), xi = lin.source_index(0);
  auto pick = [&](const CVector& y) { return CVector::Constant(1, y(zi)); };
  auto rhs = [&](cd t, const CVector& y) {
    auto r = ve_rhs(ve2, phi, t, {{Source{0, 1}, y(xi)}}, {y(zi), 0.0});
    return CVector::Constant(1, r[0]);
  };
  std::vector<std::size_t> idx;
  for (int i = 1; i <= 20; ++i) idx.push_back(static_cast<std::size_t>(i * 195));
  EXPECT_LT(residual_check(sol, pick, rhs, idx), 1e-8);
  auto wrong = [&](cd t, const CVector& y) { return CVector(rhs(t, y) + CVector::Constant(1, 1e-3)); };
  EXPECT_GT(residual_check(sol, pick, wrong, idx), 1e-4);
}

TEST(Numeric, ResidualCheck) {
  std::vector<cd> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(1.5 + 2.5 * i / 19.0);
  auto cosine = [](cd t) { return CVector::Constant(1, std::cos(t)); };
  auto osc = [](cd, const CVector& x) { return CVector(-x); };
  EXPECT_LT(residual_check(cosine, osc, samples), 1e-10);
  auto perturbed = [](cd t) { return CVector::Constant(1, std::cos(t) + 1e-3 * t * t); };
  EXPECT_GT(residual_check(perturbed, osc, samples), 1e-4);

  auto r = EnergyRegime::zero_energy();
  PhiBasis basis(r);
  BElement c = solve_forced(q(-3), BElement::unit(r));
  auto x = [&](cd t) { return CVector::Constant(1, basis.phi(t) * eval_belement(c, t)); };
  auto rhs = [&](cd t, const CVector& v) {
    cd phi = basis.phi(t);
    return CVector::Constant(1, 3.0 * v(0) / std::pow(phi, 4) + 1.0 / std::pow(phi, 3));
  };
  EXPECT_LT(residual_check(x, rhs, samples), 1e-8);
}

TEST(Numeric, UnitDeterminantOfFirstOrderMonodromy) {
  auto chain = cubic_chain();
  auto m = monodromy_matrix(linearize_ve(chain[0]).system, 0, 1.0);
  EXPECT_LT(std::abs(m.determinant() - 1.0), 1e-8);
  EXPECT_LT(m.symplectic_defect(), 1e-8);

  auto s = normalize_darboux(km2_radial(), verify_darboux(km2_radial(), {q(1), q(0)}));
  auto km2 = build_ve_chain(s.V, s.data, 1);
  auto lin = linearize_ve(km2[0], EnergyRegime::nonzero(q(1)));
  auto around = monodromy_around(lin.system, 1.0, 0.5);
  EXPECT_GT(max_abs(around.value - CMatrix::Identity(4, 4)), 1e-3);
  EXPECT_LT(std::abs(around.determinant() - 1.0), 1e-8);
  EXPECT_LT(around.symplectic_defect(), 1e-8);
}

TEST(Numeric, CommutatorDiagnostic) {
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  b.diagonal() << cd(0, 1), 5.0;
  auto r = commutator_diagnostic({a, b});
  EXPECT_EQ(r.max_norm, 0.0);
  EXPECT_FALSE(r.non_commuting);
  CMatrix id = CMatrix::Identity(3, 3);
  EXPECT_EQ(commutator_diagnostic({id, id, id}).max_norm, 0.0);
  EXPECT_THROW(commutator_diagnostic({id}), Error);
  EXPECT_NE(r.note.find("diagnostic"), std::string::npos);
}

TEST(Numeric, CommutatorAgreesWithVerdict) {
  auto nd = normalize_darboux(cubic_potential(1), verify_darboux(cubic_potential(1), {q(0), q(1)}));
  EXPECT_EQ(verdict_ve2(nd.V, nd.data).status, Status::NotVirtuallyAbelian);
  auto lin = linearize_ve(extract_ve2_alpha(cubic_chain(), 0, 0));
  auto [m0, shift] = loop_and_period(lin.system);
  EXPECT_TRUE(commutator_diagnostic({m0, shift}).non_commuting);

  auto V = diagonal_oscillator({2, 1});
  auto data = verify_darboux(V, {q(0), q(1)});
  auto nd2 = normalize_darboux(V, data);
  EXPECT_EQ(verdict_ve2(nd2.V, nd2.data).status, Status::VirtuallyAbelian);
  auto lin2 = linearize_ve(extract_ve2_alpha(build_ve_chain(nd2.V, nd2.data, 2), 0, 0));
  auto [n0, nshift] = loop_and_period(lin2.system);
  EXPECT_FALSE(commutator_diagnostic({n0, nshift}).non_commuting);
}

TEST(Numeric, Errors) {
  try {
    monodromy_matrix(trig_integral_system(1.0), 0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularityTooClose);
  }
  try {
    integrate_system(trig_integral_system(1.0), Contour::segment(cd(-1, 0.1), cd(1, 0.1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularityTooClose);
  }
  IntegrationOptions few;
  few.steps = 4;
  try {
    integrate_system(oscillator(), Contour::circle(0.0, 1.0), few);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepCountTooSmall);
  }
  IntegrationOptions coarse;
  coarse.steps = 16;
  coarse.richardson_tol = 1e-10;
  try {
    monodromy_matrix(trig_integral_system(2.0), 0, 0.3, coarse);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepCountTooSmall);
  }
  EXPECT_THROW(monodromy_matrix(trig_integral_system(1.0), 0, pi), Error);
  EXPECT_THROW(linearize_ve(build_ve_chain(cubic_potential(1), verify_darboux(cubic_potential(1), {q(0), q(1)}), 3)[2]), Error);
}

TEST(Numeric, ParallelTransportIsDeterministic) {
  auto lin = linearize_ve(extract_ve2_alpha(cubic_chain(), 0, 0));
  std::vector<Contour> loops;
  for (int n = -2; n <= 2; ++n) loops.push_back(Contour::circle(cd(n * pi, 0), 1.0));
  setenv("VEGA_THREADS", "1", 1);
  auto serial = transport_all(lin.system, loops);
  setenv("VEGA_THREADS", "4", 1);
  auto parallel = transport_all(lin.system, loops);
  unsetenv("VEGA_THREADS");
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_TRUE(serial[i].value == parallel[i].value);
}
