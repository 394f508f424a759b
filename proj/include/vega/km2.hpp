#pragma once

#include <random>
#include <utility>
#include <vector>

#include "vega/balgebra.hpp"
#include "vega/parallel.hpp"
#include "vega/vebuild.hpp"

namespace vega {

/// ω with λ = 1 − 4ω² (principal square root).
inline Scalar omega_from_lambda_km2(const Scalar& lambda) { return ((Scalar(1) - lambda) / Scalar(4)).sqrt(); }

/// φ-cofactors of a basis of ẍ = −λ x / φ⁴: {1, I} for ω = 0, else {E_ω, E_−ω}.
inline std::pair<BElement, BElement> solve_homogeneous(const Scalar& lambda, const EnergyRegime& r) {
  Scalar w = omega_from_lambda_km2(lambda);
  if (w.is_zero()) return {BElement::unit(r), BElement::I(r)};
  return {BElement::E(r, w), BElement::E(r, -w)};
}

/// With x = φc the equation ẍ = −λx/φ⁴ + b/φ³ reads D²c − (1 − λ)c = b.
inline BElement km2_residual(const Scalar& lambda, const BElement& c, const BElement& b) {
  return c.derivative().derivative() - (Scalar(1) - lambda) * c - b;
}

/// Particular solution cofactor by variation of constants.
inline BElement solve_forced(const Scalar& lambda, const BElement& b) {
  const EnergyRegime& r = b.regime();
  if (b.is_zero()) return BElement(r);
  Scalar w = omega_from_lambda_km2(lambda);
  if (w.is_zero()) {
    // c = c1 + c2 I, D c1 = −b I / 2, D c2 = b / 2
    BElement c1 = Scalar(Rational(-1, 2)) * integrate_over_phi2(b * BElement::I(r));
    BElement c2 = Scalar(Rational(1, 2)) * integrate_over_phi2(b);
    return c1 + c2 * BElement::I(r);
  }
  // c = c1 E_ω + c2 E_−ω, D c1 = b E_−ω / (4ω), D c2 = −b E_ω / (4ω)
  Scalar inv = Scalar(1) / (Scalar(4) * w);
  BElement c1 = inv * integrate_over_phi2(b * BElement::E(r, -w));
  BElement c2 = -inv * integrate_over_phi2(b * BElement::E(r, w));
  return c1 * BElement::E(r, w) + c2 * BElement::E(r, -w);
}

/// Chain ẍ_0 = −λx_0/φ⁴, ẍ_j = −λx_j/φ⁴ + x_{j−1}/φ⁴ (cofactors, top first).
inline std::vector<BElement> solve_jordan_chain(const Scalar& lambda, unsigned length, const EnergyRegime& r,
                                                const Scalar& a = Scalar(1), const Scalar& b = Scalar(1)) {
  if (length < 1) fail(ErrorCode::InvalidArgument, "chain length must be at least 1");
  auto [h1, h2] = solve_homogeneous(lambda, r);
  std::vector<BElement> out{a * h1 + b * h2};
  for (unsigned j = 1; j < length; ++j) out.push_back(solve_forced(lambda, out.back()));
  return out;
}

/// Per-order cofactors B_m (q_m = φ P B_m in original coordinates) with the
/// symbolic residuals of every equation.
struct Km2Solution {
  EnergyRegime regime;
  unsigned p_max = 0;
  std::vector<VESystem> chain;
  /// B[m-1][j]: order m, eigen-coordinate j.
  std::vector<std::vector<BElement>> B;
  std::vector<std::vector<BElement>> forcing;
  std::vector<std::vector<BElement>> residuals;
  bool all_residuals_zero = true;
};

/// R_{p,j} in 𝓑: forcing terms of VE_p with x_m = φ B_m (the φ powers cancel
/// against φ^{k−1−s} up to the common 1/φ³).
inline std::vector<BElement> km2_forcing(const VESystem& sys, const std::vector<std::vector<BElement>>& B,
                                         const EnergyRegime& r) {
  std::vector<BElement> out(sys.n, BElement(r));
  for (const auto& t : sys.forcing) {
    BElement prod = BElement::unit(r);
    for (const auto& [src, e] : t.monomial) prod = prod * B[src.order - 1][src.component].pow(e);
    out[t.target] = out[t.target] + t.coefficient * prod;
  }
  return out;
}

namespace detail {

/// Contiguous Jordan blocks [first, last] of the eigenbasis.
inline std::vector<std::pair<std::size_t, std::size_t>> jordan_blocks(const DarbouxData& data) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t n = data.n();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && data.jordan_coupling.size() > j && data.jordan_coupling[j]) ++j;
    out.push_back({i, j});
    i = j + 1;
  }
  return out;
}

/// Solves ẍ = −φ⁻⁴(Λ + J)x + R/φ³ block by block, from the bottom of each chain.
inline std::vector<BElement> solve_linear_level(const DarbouxData& data, const std::vector<BElement>& R,
                                                const std::vector<std::pair<Scalar, Scalar>>& seeds,
                                                const EnergyRegime& r) {
  std::size_t n = data.n();
  std::vector<BElement> c(n, BElement(r));
  auto blocks = jordan_blocks(data);
  auto solved = parallel_map<std::vector<BElement>>(blocks.size(), [&](std::size_t bi) {
    auto [first, last] = blocks[bi];
    std::vector<BElement> local(last - first + 1, BElement(r));
    for (std::size_t i = last + 1; i-- > first;) {
      const Scalar& lambda = data.eigenvalues[i];
      BElement b = R[i];
      if (i < last) b = b - local[i + 1 - first];  // −φ⁻⁴ x_{i+1} = −(B_{i+1})/φ³
      BElement ci = solve_forced(lambda, b);
      if (!seeds.empty()) {
        auto [h1, h2] = solve_homogeneous(lambda, r);
        ci = ci + seeds[i].first * h1 + seeds[i].second * h2;
      }
      local[i - first] = ci;
    }
    return local;
  });
  for (std::size_t bi = 0; bi < blocks.size(); ++bi)
    for (std::size_t i = blocks[bi].first; i <= blocks[bi].second; ++i) c[i] = solved[bi][i - blocks[bi].first];
  return c;
}

}  // namespace detail

/// Deterministic small rational constants for the first-order homogeneous part.
inline std::vector<std::pair<Scalar, Scalar>> km2_seeds(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(1, 5), den(1, 3);
  std::vector<std::pair<Scalar, Scalar>> out;
  for (std::size_t i = 0; i < n; ++i) {
    Scalar a(Rational(num(rng), den(rng)));
    Scalar b(Rational(num(rng), den(rng)));
    out.push_back({a, b});
  }
  return out;
}

/// Builds q_m = φ B_m for m = 1..p_max. Order 1 uses the homogeneous solution
/// with the given constants; higher orders add the particular solution only.
inline Km2Solution solve_ve_chain_km2(const HomogeneousPotential& V, const DarbouxData& data, unsigned p_max,
                                      const EnergyRegime& regime,
                                      std::vector<std::pair<Scalar, Scalar>> seeds = {}) {
  if (data.k != -2) fail(ErrorCode::InvalidArgument, "the k = -2 solver requires degree -2");
  if (!data.normalized) fail(ErrorCode::InvalidArgument, "Darboux data must be normalized (γ = 1)");
  if (p_max < 1) fail(ErrorCode::InvalidOrder, "p_max must be at least 1");
  std::size_t n = data.n();
  if (seeds.empty()) seeds = km2_seeds(n, 1);
  if (seeds.size() != n) fail(ErrorCode::InvalidArgument, "one pair of constants per component");

  Km2Solution sol;
  sol.regime = regime;
  sol.p_max = p_max;
  EigenTensors tensors(V, data);
  for (unsigned s = 2; s <= p_max; ++s) tensors.order(s);  // fill the cache before parallel use
  sol.chain = build_ve_chain(tensors, p_max, true);
  for (unsigned p = 1; p <= p_max; ++p) {
    auto R = km2_forcing(sol.chain[p - 1], sol.B, regime);
    auto c = detail::solve_linear_level(data, R, p == 1 ? seeds : std::vector<std::pair<Scalar, Scalar>>{}, regime);
    std::vector<BElement> res(n, BElement(regime));
    for (std::size_t j = 0; j < n; ++j) {
      BElement b = R[j];
      if (j + 1 < n && data.jordan_coupling.size() > j && data.jordan_coupling[j]) b = b - c[j + 1];
      res[j] = km2_residual(data.eigenvalues[j], c[j], b);
      if (!res[j].is_zero(data.eigenvalues[j].is_exact() ? 0.0 : 1e-9))
        sol.all_residuals_zero = false;
    }
    sol.B.push_back(std::move(c));
    sol.forcing.push_back(std::move(R));
    sol.residuals.push_back(std::move(res));
  }
  return sol;
}

}  // namespace vega
