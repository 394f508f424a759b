#include <gtest/gtest.h>

#include <algorithm>

#include "galois_tables.hpp"
#include "potentials.hpp"
#include "vega/galois_k2.hpp"

using namespace vega;
using namespace vega::testing;

namespace {

struct Setup {
  HomogeneousPotential V;
  DarbouxData data;
};

Setup normalized(const HomogeneousPotential& V, const Point& d) {
  auto nd = normalize_darboux(V, verify_darboux(V, d));
  return {nd.V, nd.data};
}

HomogeneousPotential cubic_with_lambda(long long l1, long long c) {
  // l1/2 q1² + q2²/2 + c q1³/q2
  Poly num = q(l1, 2) * var(2, 0).pow(2) * var(2, 1) + q(1, 2) * var(2, 1).pow(3) + Scalar(c) * var(2, 0).pow(3);
  return HomogeneousPotential(2, 2, num, var(2, 1));
}

}  // namespace

TEST(Galois, CombinationTags) {
  auto f = std::vector<Frequency>{frequency_from_lambda(q(2)), frequency_from_lambda(q(8)),
                                  frequency_from_lambda(q(1))};
  EXPECT_EQ(combination_tag(f, {2, -1, 0}), FrequencyTag::Zero);
  EXPECT_EQ(combination_tag(f, {2, -1, 3}), FrequencyTag::NonzeroRational);
  EXPECT_EQ(combination_tag(f, {1, 0, 1}), FrequencyTag::Irrational);
  EXPECT_EQ(combination_tag(f, {1, 1, 0}), FrequencyTag::Irrational);
  Frequency u = frequency_from_lambda(Scalar::from_double(2.0));
  EXPECT_EQ(combination_tag({u, f[2]}, {1, 1}), FrequencyTag::Undetermined);
  EXPECT_EQ(combination_tag({u, f[2]}, {0, 1}), FrequencyTag::NonzeroRational);
}

TEST(Galois, Ve2AlphaExamples) {
  auto z = frequency_from_lambda(q(0)), s2 = frequency_from_lambda(q(2)), one = frequency_from_lambda(q(1));
  EXPECT_EQ(check_ve2_alpha(q(0), s2, z).status, Status::VirtuallyAbelian);
  auto v = check_ve2_alpha(q(-6), s2, s2);
  EXPECT_EQ(v.status, Status::NotVirtuallyAbelian);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness->table_case, 4);
  EXPECT_FALSE(v.witness->integral_verdict->meromorphic);
  auto v1 = check_ve2_alpha(q(1), z, z);
  EXPECT_EQ(v1.status, Status::NotVirtuallyAbelian);
  EXPECT_EQ(v1.witness->table_case, 1);
  EXPECT_EQ(*v1.witness->integral, TrigIntegralSpec::polynomial(0));
  EXPECT_EQ(check_ve2_alpha(q(3), one, frequency_from_lambda(q(9, 4))).status, Status::VirtuallyAbelian);
  auto und = frequency_from_lambda(Scalar::from_double(3.0));
  EXPECT_EQ(check_ve2_alpha(q(1), one, und).status, Status::Inconclusive);
  EXPECT_EQ(check_ve2_alpha(q(1), z, und).status, Status::NotVirtuallyAbelian);
}

TEST(Galois, Ex2Examples) {
  auto f = [](long long l) { return frequency_from_lambda(q(l)); };
  EXPECT_EQ(check_ex2(q(0), f(2), f(3), f(0)).status, Status::VirtuallyAbelian);
  EXPECT_EQ(check_ex2(q(1), f(1), f(4), f(9)).status, Status::VirtuallyAbelian);
  auto v = check_ex2(q(1), f(1), f(0), f(1));
  EXPECT_EQ(v.status, Status::NotVirtuallyAbelian);
  EXPECT_EQ(v.witness->table_case, 4);
  EXPECT_EQ(check_ex2(q(1), f(0), f(1), f(1)).witness->table_case, 4);
  EXPECT_EQ(check_ex2(q(1), f(2), f(2), f(8)).witness->table_case, 6);
  // the case 6 witness frequency is certified irrational
  auto w6 = check_ex2(q(1), f(2), f(2), f(8)).witness;
  EXPECT_GT(std::abs(w6->integral->omega.to_complex()), 1e-9);
}

TEST(Galois, TruthTablesMatchClassifierRoute) {
  auto freqs = probe_frequencies();
  int checked = 0;
  for (int th = 0; th <= 1; ++th) {
    Scalar theta(th);
    for (const auto& a : freqs)
      for (const auto& g : freqs) {
        auto v = check_ve2_alpha(theta, a, g);
        bool want = expected_iff(th == 0, {a, g});
        EXPECT_EQ(v.status == Status::VirtuallyAbelian, want);
        auto table = table_va1(a.tag == FrequencyTag::Zero, g.tag == FrequencyTag::Zero);
        EXPECT_EQ(v.status, classifier_route(th == 0, {a, g}, table));
        if (v.status == Status::NotVirtuallyAbelian) EXPECT_FALSE(v.witness->integral_verdict->meromorphic);
        ++checked;
        for (const auto& b : freqs) {
          auto e = check_ex2(theta, a, b, g);
          EXPECT_EQ(e.status == Status::VirtuallyAbelian, expected_iff(th == 0, {a, b, g}));
          auto t2 = table_va2(a.tag == FrequencyTag::Zero, b.tag == FrequencyTag::Zero, g.tag == FrequencyTag::Zero);
          EXPECT_EQ(e.status, classifier_route(th == 0, {a, b, g}, t2));
          if (e.status == Status::NotVirtuallyAbelian) EXPECT_FALSE(e.witness->integral_verdict->meromorphic);
          ++checked;
        }
      }
  }
  EXPECT_EQ(checked, 2 * (16 + 64));
}

TEST(Galois, VerdictVe2Examples) {
  auto osc = normalized(diagonal_oscillator({1, 2, 3}), {q(1), q(0), q(0)});
  EXPECT_EQ(verdict_ve2(osc.V, osc.data).status, Status::VirtuallyAbelian);

  for (long long c : {1LL, 2LL, -5LL}) {
    auto s = normalized(cubic_potential(c), {q(0), q(1)});
    auto v = verdict_ve2(s.V, s.data);
    ASSERT_EQ(v.status, Status::NotVirtuallyAbelian);
    EXPECT_EQ(v.witness->subsystem, "VE2_alpha");
    EXPECT_EQ(*v.witness->alpha, 0u);
    EXPECT_EQ(*v.witness->gamma, 0u);
    EXPECT_EQ(v.witness->coefficient, Scalar(-6 * c));
    EXPECT_EQ(v.witness->tags[0], FrequencyTag::Irrational);
  }
  auto r = normalized(cubic_with_lambda(4, 1), {q(0), q(1)});
  EXPECT_EQ(verdict_ve2(r.V, r.data).status, Status::VirtuallyAbelian);

  auto km2 = normalized(km2_radial(), {q(1), q(0)});
  EXPECT_THROW(verdict_ve2(km2.V, km2.data), Error);
}

TEST(Galois, VerdictInvariantUnderPermutationAndScaling) {
  for (long long c : {1LL, 3LL}) {
    auto s = normalized(cubic_potential(c), {q(0), q(1)});
    auto base = verdict_ve2(s.V, s.data);
    // swap coordinates
    auto V = cubic_potential(c);
    Poly num = V.numerator(), den = V.denominator();
    auto swapvars = [](const Poly& p) {
      Poly out(2);
      for (const auto& [m, v] : p.terms()) out.add_term(MultiIndex{m[1], m[0]}, v);
      return out;
    };
    auto p = normalized(HomogeneousPotential(2, 2, swapvars(num), swapvars(den)), {q(1), q(0)});
    auto perm = verdict_ve2(p.V, p.data);
    EXPECT_EQ(perm.status, base.status);
    EXPECT_EQ(perm.witness->coefficient, base.witness->coefficient);
    // scaling
    auto sc = normalized(V.scaled(q(7, 3)), {q(0), q(1)});
    auto scaled = verdict_ve2(sc.V, sc.data);
    EXPECT_EQ(scaled.status, base.status);
    EXPECT_EQ(scaled.witness->coefficient, base.witness->coefficient);
  }
}

TEST(Galois, VerdictIndependentOfThreadCount) {
  auto s = normalized(cubic_potential(2), {q(0), q(1)});
  setenv("VEGA_THREADS", "1", 1);
  auto a = verdict_ve2(s.V, s.data);
  setenv("VEGA_THREADS", "4", 1);
  auto b = verdict_ve2(s.V, s.data);
  unsetenv("VEGA_THREADS");
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.witness->coefficient, b.witness->coefficient);
  EXPECT_EQ(a.witness->subsystem, b.witness->subsystem);
}

TEST(Galois, InductiveOscillatorCertificate) {
  auto s = normalized(diagonal_oscillator({1, 2, 3}), {q(1), q(0), q(0)});
  auto r = inductive_analysis(s.V, s.data, 5, true);
  EXPECT_EQ(r.verdict.status, Status::VirtuallyAbelian);
  EXPECT_EQ(r.verdict.order_reached, 5u);
  ASSERT_EQ(r.certificate.xi_tables.size(), 4u);
  for (const auto& table : r.certificate.xi_tables)
    for (const auto& comp : table) EXPECT_TRUE(comp.empty());
  EXPECT_TRUE(r.certificate.euler_chain_consistent);
  EXPECT_TRUE(r.certificate.taylor_coefficients_vanish);
  EXPECT_TRUE(r.certificate.simple_form_propagates);
  ASSERT_EQ(r.certificate.euler_chain.size(), 5u);
  EXPECT_EQ(r.certificate.euler_chain[0], q(1));
  try {
    inductive_analysis(s.V, s.data, 5, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonResonanceNotEstablished);
  }
  // resonant spectrum (1, 2): independence is certified False
  auto res = normalized(diagonal_oscillator({1, 4}), {q(1), q(0)});
  EXPECT_THROW(inductive_analysis(res.V, res.data, 3, true), Error);
}

TEST(Galois, InductiveDetectsCubicTerm) {
  auto s = normalized(cubic_potential(1), {q(0), q(1)});
  auto r = inductive_analysis(s.V, s.data, 4, true);
  EXPECT_EQ(r.verdict.status, Status::NotVirtuallyAbelian);
  EXPECT_EQ(r.verdict.order_reached, 2u);
  ASSERT_TRUE(r.verdict.witness);
  EXPECT_EQ(*r.verdict.witness->gamma, 0u);
  EXPECT_EQ(*r.verdict.witness->multi_index, (MultiIndex{2, 0}));
  EXPECT_EQ(r.verdict.witness->coefficient, q(-3));  // θ/2!
  EXPECT_FALSE(r.verdict.witness->integral_verdict->meromorphic);
}

TEST(Galois, EulerChainOnDegreeTwoRationalPotentials) {
  for (long long c : {1LL, -2LL, 5LL}) {
    auto s = normalized(cubic_potential(c), {q(0), q(1)});
    Scalar prev = directional_derivative(s.V, s.data.d, 2);
    EXPECT_EQ(prev, Scalar(2) * s.V.value(s.data.d));
    for (unsigned p = 2; p <= 5; ++p) {
      Scalar next = directional_derivative(s.V, s.data.d, p + 1);
      EXPECT_EQ(next, Scalar(2 - static_cast<int>(p)) * prev) << p;
      prev = next;
    }
  }
}
