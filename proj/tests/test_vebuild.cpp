#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "potentials.hpp"
#include "vega/vebuild.hpp"

using namespace vega;
using namespace vega::testing;

namespace {

using cd = std::complex<double>;

struct Setup {
  HomogeneousPotential V;
  DarbouxData data;
};

Setup normalized(const HomogeneousPotential& V, const Point& d) {
  auto nd = normalize_darboux(V, verify_darboux(V, d));
  return {nd.V, nd.data};
}

ForcingMonomial mono(std::initializer_list<std::pair<const Source, unsigned>> l) { return ForcingMonomial(l); }

// p! [ε^p] P^{-1} F(φ d + Σ_m ε^m P x_m / m!) by a Cauchy integral over |ε| = r.
std::vector<cd> series_oracle(const HomogeneousPotential& V, const DarbouxData& data, double phi,
                              const std::vector<std::vector<cd>>& x, unsigned p) {
  ForceField F(V);
  std::size_t n = data.n();
  const int N = 96;
  const double r = 0.2;
  std::vector<cd> acc(n, 0.0);
  Matrix P = data.eigenbasis.to_float(), Pinv = data.eigenbasis_inv.to_float();
  for (int s = 0; s < N; ++s) {
    cd eps = std::polar(r, 2 * std::numbers::pi * s / N);
    std::vector<cd> xx(n, 0.0);
    double fact = 1;
    cd epow = 1;
    for (unsigned m = 1; m < x.size(); ++m) {
      fact *= m;
      epow *= eps;
      for (std::size_t a = 0; a < n; ++a) xx[a] += epow * x[m][a] / fact;
    }
    Point pt;
    for (std::size_t i = 0; i < n; ++i) {
      cd v = phi * data.d[i].to_complex();
      for (std::size_t a = 0; a < n; ++a) v += P(i, a).to_complex() * xx[a];
      pt.push_back(Scalar::from_complex(v));
    }
    auto fv = F.value(pt);
    std::vector<cd> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = fv[i].to_complex();
    for (std::size_t j = 0; j < n; ++j) {
      cd fj = 0;
      for (std::size_t i = 0; i < n; ++i) fj += Pinv(j, i).to_complex() * f[i];
      acc[j] += fj / std::pow(eps, static_cast<int>(p));
    }
  }
  double pf = std::tgamma(p + 1.0);
  for (auto& a : acc) a *= pf / N;
  return acc;
}

std::vector<cd> eval_forcing(const VESystem& sys, double phi, const std::vector<std::vector<cd>>& x) {
  std::vector<cd> out(sys.n, 0.0);
  for (const auto& t : sys.forcing) {
    cd v = t.coefficient.to_complex() * std::pow(phi, t.phi_power);
    for (const auto& [s, e] : t.monomial) v *= std::pow(x[s.order][s.component], static_cast<int>(e));
    out[t.target] += v;
  }
  return out;
}

}  // namespace

TEST(VeBuild, PartitionCoefficientsCountSetPartitions) {
  // Σ over integer partitions with ≥ 2 parts equals Bell(p) - 1.
  const long long bell[] = {1, 1, 2, 5, 15, 52, 203};
  for (unsigned p = 2; p <= 6; ++p) {
    Rational sum = 0;
    for (const auto& parts : detail::partitions(p)) sum += detail::faa_di_bruno_coefficient(p, parts);
    EXPECT_EQ(sum, Rational(bell[p] - 1)) << p;
  }
  EXPECT_EQ(detail::faa_di_bruno_coefficient(3, {1, 2}), Rational(3));
  EXPECT_EQ(detail::faa_di_bruno_coefficient(3, {1, 1, 1}), Rational(1));
}

TEST(VeBuild, CubicSecondOrderForcing) {
  for (long long c : {1LL, 2LL, -3LL}) {
    auto s = normalized(cubic_potential(c), {q(0), q(1)});
    auto chain = build_ve_chain(s.V, s.data, 2);
    ASSERT_EQ(chain.size(), 2u);
    EXPECT_TRUE(chain[0].forcing.empty());
    ASSERT_EQ(chain[1].forcing.size(), 1u);
    const auto& t = chain[1].forcing[0];
    EXPECT_EQ(t.target, 0u);
    EXPECT_EQ(t.coefficient, Scalar(-6 * c));
    EXPECT_EQ(t.phi_power, -1);
    EXPECT_EQ(t.monomial, mono({{Source{0, 1}, 2}}));
    EXPECT_TRUE(chain[1].is_simple_form());
  }
}

TEST(VeBuild, CubicThirdOrderForcing) {
  auto s = normalized(cubic_potential(1), {q(0), q(1)});
  auto chain = build_ve_chain(s.V, s.data, 3);
  const auto& f = chain[2].forcing;
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], (ForcingTerm{0, Scalar(-18), -1, mono({{Source{0, 1}, 1}, {Source{0, 2}, 1}})}));
  EXPECT_EQ(f[1], (ForcingTerm{0, Scalar(18), -2, mono({{Source{0, 1}, 2}, {Source{1, 1}, 1}})}));
  EXPECT_EQ(f[2], (ForcingTerm{1, Scalar(6), -2, mono({{Source{0, 1}, 3}})}));
  EXPECT_FALSE(chain[2].is_simple_form());
}

TEST(VeBuild, QuadraticPotentialHasNoForcing) {
  auto s = normalized(diagonal_oscillator({1, 2, 3}), {q(1), q(0), q(0)});
  auto chain = build_ve_chain(s.V, s.data, 4);
  for (const auto& sys : chain) EXPECT_TRUE(sys.forcing.empty()) << sys.label;
  EXPECT_EQ(chain[0].eigenvalues, (std::vector<Scalar>{q(1), q(2), q(3)}));
}

TEST(VeBuild, ForcingMatchesSeriesExpansion) {
  auto s = normalized(rotated_cubic(), {q(1, 2), q(1, 2)});
  ASSERT_FALSE(s.data.eigenbasis.is_identity());
  EigenTensors tensors(s.V, s.data);
  auto chain = build_ve_chain(tensors, 4);
  std::vector<std::vector<cd>> x = {{}, {0.3, -0.7}, {1.1, 0.4}, {-0.5, 0.9}, {0.0, 0.0}};
  for (double phi : {0.8, 1.7}) {
    for (unsigned p = 2; p <= 4; ++p) {
      auto xs = x;
      xs.resize(p + 1);
      xs[p] = {0.0, 0.0};
      auto want = series_oracle(s.V, s.data, phi, xs, p);
      auto got = eval_forcing(chain[p - 1], phi, xs);
      for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(got[j] - want[j]), 0.0, 1e-8 * (1 + std::abs(want[j])));
    }
  }
}

TEST(VeBuild, ForcingMatchesSeriesForRationalPotential) {
  auto s = normalized(cubic_potential(2), {q(0), q(1)});
  auto chain = build_ve_chain(s.V, s.data, 4);
  std::vector<std::vector<cd>> x = {{}, {0.2, 0.5}, {-0.3, 0.6}, {0.7, -0.1}, {0.0, 0.0}};
  for (unsigned p = 2; p <= 4; ++p) {
    auto xs = x;
    xs.resize(p + 1);
    xs[p] = {0.0, 0.0};
    auto want = series_oracle(s.V, s.data, 1.3, xs, p);
    auto got = eval_forcing(chain[p - 1], 1.3, xs);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(got[j] - want[j]), 0.0, 1e-8 * (1 + std::abs(want[j])));
  }
}

TEST(VeBuild, SimpleFormCoefficientsMatchPartials) {
  auto s = normalized(cubic_potential(3), {q(0), q(1)});
  EigenTensors tensors(s.V, s.data);
  ForceField F(s.V);
  for (unsigned p = 2; p <= 4; ++p) {
    auto xi = simple_form_xi(tensors, p);
    for (std::size_t j = 0; j < 2; ++j)
      for (const auto& alpha : multi_indices_of_order(2, p)) {
        Scalar want = F.partial_at(j, alpha, s.data.d) / Scalar(alpha.factorial());
        auto it = xi[j].find(alpha);
        EXPECT_EQ(it == xi[j].end() ? Scalar(0) : it->second, want);
      }
  }
}

TEST(VeBuild, CouplingTensorsAreSymmetricSlices) {
  auto V = rotated_cubic();
  auto s = normalized(V, {q(1, 2), q(1, 2)});
  auto theta = coupling_theta(s.V, s.data);
  auto xi = coupling_xi(s.V, s.data);
  EXPECT_EQ(theta.order(), 2u);
  EXPECT_EQ(xi.order(), 3u);
  EXPECT_EQ(theta.entry(0, std::vector<int>{0, 1}), theta.entry(0, std::vector<int>{1, 0}));
  // raw θ is the second derivative tensor of the force
  ForceField F(s.V);
  auto raw = coupling_theta(F, s.data.d);
  EXPECT_EQ(raw.entry(1, std::vector<int>{0, 1}), F.partial_at(1, MultiIndex{1, 1}, s.data.d));
}

TEST(VeBuild, Errors) {
  auto s = normalized(cubic_potential(1), {q(0), q(1)});
  EXPECT_THROW(build_ve_chain(s.V, s.data, 0), Error);
  auto raw = verify_darboux(rotated_cubic(), {q(1, 2), q(1, 2)});
  try {
    build_ve_chain(rotated_cubic(), raw, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
  auto j = normalized(jordan_potential(), {q(1), Scalar::i()});
  try {
    build_ve_chain(j.V, j.data, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDiagonalizable);
  }
  EXPECT_NO_THROW(build_ve_chain(EigenTensors(j.V, j.data), 2, true));
}

TEST(VeBuild, SubsystemExtraction) {
  auto s = normalized(rotated_cubic(), {q(1, 2), q(1, 2)});
  auto chain = build_ve_chain(s.V, s.data, 2);
  const auto& ve2 = chain[1];
  for (std::size_t g = 0; g < 2; ++g) {
    auto a = extract_ve2_alpha(chain, 0, g);
    auto b = extract_ve2_alpha(chain, 1, g);
    auto ex = extract_ex2(chain, 0, 1, g);
    auto ab = extract_ve2_alpha_beta(chain, 0, 1, g);
    // VE2,(α,β) = VE2,α + VE2,β + EX2 at the level of forcings
    std::vector<ForcingTerm> sum = a.forcing;
    sum.insert(sum.end(), b.forcing.begin(), b.forcing.end());
    sum.insert(sum.end(), ex.forcing.begin(), ex.forcing.end());
    EXPECT_EQ(canonicalize(sum), ab.forcing);
    for (const auto& t : ex.forcing) {
      EXPECT_EQ(t.monomial, mono({{Source{0, 1}, 1}, {Source{1, 1}, 1}}));
      EXPECT_EQ(t.phi_power, s.data.k - 3);
    }
    // with n = 2 the two-source subsystem is all of VE2's equation γ
    std::size_t count = 0;
    for (const auto& t : ve2.forcing) count += t.target == g;
    EXPECT_EQ(ab.forcing.size(), count);
  }
  EXPECT_THROW(extract_ve2_alpha(chain, 2, 0), Error);
  EXPECT_THROW(extract_ve2_alpha(chain, 0, 5), Error);
  try {
    extract_ex2(chain, 1, 1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlphaEqualsBeta);
  }
}

TEST(VeBuild, ThetaAppearsWithFactorTwoInCrossTerm) {
  auto s = normalized(rotated_cubic(), {q(1, 2), q(1, 2)});
  auto chain = build_ve_chain(s.V, s.data, 2);
  auto theta = coupling_theta(s.V, s.data);
  for (std::size_t g = 0; g < 2; ++g) {
    auto ex = extract_ex2(chain, 0, 1, g);
    Scalar want = Scalar(2) * theta.entry(g, std::vector<int>{0, 1});
    if (want.is_zero()) EXPECT_TRUE(ex.forcing.empty());
    else {
      ASSERT_EQ(ex.forcing.size(), 1u);
      EXPECT_EQ(ex.forcing[0].coefficient, want);
    }
    auto a = extract_ve2_alpha(chain, 0, g);
    Scalar ta = theta.entry(g, std::vector<int>{0, 0});
    if (!ta.is_zero()) {
      ASSERT_EQ(a.forcing.size(), 1u);
      EXPECT_EQ(a.forcing[0].coefficient, ta);
    }
  }
}

TEST(VeBuild, Superposition) {
  auto s = normalized(rotated_cubic(), {q(1, 2), q(1, 2)});
  auto chain = build_ve_chain(s.V, s.data, 2);
  auto a = extract_ve2_alpha(chain, 0, 1);
  auto b = extract_ve2_alpha(chain, 1, 1);
  SampledSolution sa{a, {{q(1)}, {q(2)}}}, sb{b, {{q(3)}, {q(-1)}}};
  auto sum = superpose({sa, sb});
  EXPECT_EQ(sum.values, (std::vector<std::vector<Scalar>>{{q(4)}, {q(1)}}));
  EXPECT_EQ(sum.system.active_sources, (std::vector<std::size_t>{0, 1}));
  auto other = extract_ve2_alpha(chain, 0, 0);
  try {
    superpose({sa, SampledSolution{other, {{q(1)}, {q(1)}}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LinearPartMismatch);
  }
}
