#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vega/darboux.hpp"

namespace vega {

/// Solution component x_{component, order} (0-based component).
struct Source {
  std::size_t component;
  unsigned order;
  friend auto operator<=>(const Source&, const Source&) = default;
};

/// Product of sources with exponents, e.g. x_{1,1}^2 x_{2,1}.
using ForcingMonomial = std::map<Source, unsigned>;

inline unsigned monomial_degree(const ForcingMonomial& m) {
  unsigned d = 0;
  for (const auto& [s, e] : m) d += e;
  return d;
}

/// coefficient * φ^phi_power * monomial, added to the equation of `target`.
struct ForcingTerm {
  std::size_t target = 0;
  Scalar coefficient;
  int phi_power = 0;
  ForcingMonomial monomial;
  friend bool operator==(const ForcingTerm&, const ForcingTerm&) = default;
};

inline bool forcing_less(const ForcingTerm& a, const ForcingTerm& b) {
  if (a.target != b.target) return a.target < b.target;
  if (a.phi_power != b.phi_power) return a.phi_power > b.phi_power;
  unsigned da = monomial_degree(a.monomial), db = monomial_degree(b.monomial);
  if (da != db) return da < db;
  return a.monomial < b.monomial;
}

/// Sorts terms and merges those with equal (target, phi_power, monomial);
/// zero coefficients are dropped.
inline std::vector<ForcingTerm> canonicalize(std::vector<ForcingTerm> terms, double tol = 0.0) {
  std::sort(terms.begin(), terms.end(), forcing_less);
  std::vector<ForcingTerm> out;
  for (auto& t : terms) {
    if (!out.empty() && out.back().target == t.target && out.back().phi_power == t.phi_power &&
        out.back().monomial == t.monomial)
      out.back().coefficient += t.coefficient;
    else
      out.push_back(std::move(t));
  }
  std::erase_if(out, [&](const ForcingTerm& t) { return t.coefficient.approx_zero(tol); });
  return out;
}

/// ẍ_j = -φ^{k-2} (λ_j x_j + [J]_{j,j+1} x_{j+1}) + Σ forcing, for order p.
struct VESystem {
  unsigned order = 1;
  std::size_t n = 0;
  int k = 2;
  std::vector<Scalar> eigenvalues;
  std::vector<bool> jordan_coupling;
  std::vector<ForcingTerm> forcing;
  /// Components whose equations belong to the (sub)system; empty means all.
  std::vector<std::size_t> active_sources;
  std::vector<std::size_t> active_targets;
  std::string label;

  bool same_linear_part(const VESystem& o) const {
    return order == o.order && n == o.n && k == o.k && eigenvalues == o.eigenvalues &&
           jordan_coupling == o.jordan_coupling && active_sources == o.active_sources &&
           active_targets == o.active_targets;
  }

  /// All sources are first-order solutions (the simple form).
  bool is_simple_form() const {
    for (const auto& t : forcing)
      for (const auto& [s, e] : t.monomial)
        if (s.order != 1) return false;
    return true;
  }

  friend bool operator==(const VESystem&, const VESystem&) = default;
};

// ---------------------------------------------------------------------------
// Tensors in the eigenbasis.

/// D^s F in coordinates x = P^{-1} q: T̃_j(e_a..) = Σ_i (P^{-1})_{ji} D^sF_i(P e_a, ..).
inline SymmetricTensor transform_tensor(const SymmetricTensor& t, const Matrix& p, const Matrix& pinv) {
  if (p.is_identity()) return t;
  std::size_t n = t.n();
  SymmetricTensor out(n, t.order());
  std::vector<Vector> cols;
  for (std::size_t a = 0; a < n; ++a) cols.push_back(p.column(a));
  std::vector<Scalar> raw(n);
  for (const auto& alpha : multi_indices_of_order(n, t.order())) {
    std::vector<std::vector<Scalar>> vs;
    for (int a : alpha.to_indices()) vs.push_back(cols[static_cast<std::size_t>(a)]);
    for (std::size_t i = 0; i < n; ++i) raw[i] = t.apply(i, vs);
    for (std::size_t j = 0; j < n; ++j) {
      Scalar v(0);
      for (std::size_t i = 0; i < n; ++i)
        if (!pinv(j, i).is_zero() && !raw[i].is_zero()) v += pinv(j, i) * raw[i];
      out.set(j, alpha, v);
    }
  }
  return out;
}

/// Derivative tensors of F at d in eigenbasis coordinates, memoized per order.
class EigenTensors {
 public:
  EigenTensors(const HomogeneousPotential& V, const DarbouxData& data, double tol = default_tolerance)
      : F_(V), data_(data), tol_(tol) {}

  const SymmetricTensor& order(unsigned s) const {
    if (auto it = cache_.find(s); it != cache_.end()) return it->second;
    auto raw = derivative_tensor(F_, data_.d, s, tol_);
    return cache_.emplace(s, transform_tensor(raw, data_.eigenbasis, data_.eigenbasis_inv)).first->second;
  }
  const ForceField& force() const { return F_; }
  const DarbouxData& data() const { return data_; }

 private:
  ForceField F_;
  DarbouxData data_;
  double tol_;
  mutable std::map<unsigned, SymmetricTensor> cache_;
};

/// θ^i_{α,β} = D_{α,β}F_i(d) in the given coordinates.
inline SymmetricTensor coupling_theta(const ForceField& F, const Point& d, double tol = default_tolerance) {
  return derivative_tensor(F, d, 2, tol);
}
inline SymmetricTensor coupling_xi(const ForceField& F, const Point& d, double tol = default_tolerance) {
  return derivative_tensor(F, d, 3, tol);
}
/// Same tensors in the Hessian eigenbasis (the coordinates of the VE chain).
inline SymmetricTensor coupling_theta(const HomogeneousPotential& V, const DarbouxData& data) {
  return EigenTensors(V, data).order(2);
}
inline SymmetricTensor coupling_xi(const HomogeneousPotential& V, const DarbouxData& data) {
  return EigenTensors(V, data).order(3);
}

/// Simple-form coefficients ξ^j_α = (1/α!) ∂^α F̃_j(d) for |α| = p.
inline std::vector<std::map<MultiIndex, Scalar, GradedLex>> simple_form_xi(const EigenTensors& tensors, unsigned p,
                                                                          double tol = 0.0) {
  const auto& t = tensors.order(p);
  std::vector<std::map<MultiIndex, Scalar, GradedLex>> out(t.n());
  for (std::size_t j = 0; j < t.n(); ++j)
    for (const auto& [alpha, v] : t.component(j)) {
      Scalar x = v / Scalar(alpha.factorial());
      if (!x.approx_zero(tol)) out[j][alpha] = x;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Chain construction.

namespace detail {

inline BigInt factorial(unsigned m) {
  BigInt f = 1;
  for (unsigned i = 2; i <= m; ++i) f *= i;
  return f;
}

/// Partitions of p into at least two positive parts (ascending parts).
inline std::vector<std::vector<unsigned>> partitions(unsigned p) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur;
  auto rec = [&](auto&& self, unsigned left, unsigned min_part) -> void {
    if (left == 0) {
      if (cur.size() >= 2) out.push_back(cur);
      return;
    }
    for (unsigned m = min_part; m <= left; ++m) {
      cur.push_back(m);
      self(self, left - m, m);
      cur.pop_back();
    }
  };
  rec(rec, p, 1);
  return out;
}

/// p! / (∏ m_i! ∏ mult_r!) for a partition.
inline Rational faa_di_bruno_coefficient(unsigned p, const std::vector<unsigned>& parts) {
  BigInt den = 1;
  for (unsigned m : parts) den *= factorial(m);
  std::map<unsigned, unsigned> mult;
  for (unsigned m : parts) ++mult[m];
  for (const auto& [m, r] : mult) den *= factorial(r);
  return Rational(factorial(p), den);
}

}  // namespace detail

/// Forcing of VE_p: Σ over partitions {m_1..m_s} of p (s ≥ 2) of
/// c · φ^{k-1-s} · D^sF̃(x_{m_1}, .., x_{m_s}).
inline std::vector<ForcingTerm> ve_forcing(const EigenTensors& tensors, unsigned p, int k, double tol = 0.0) {
  std::vector<ForcingTerm> terms;
  if (p < 2) return terms;
  std::size_t n = tensors.data().n();
  for (const auto& parts : detail::partitions(p)) {
    unsigned s = static_cast<unsigned>(parts.size());
    Scalar c(detail::faa_di_bruno_coefficient(p, parts));
    const SymmetricTensor& t = tensors.order(s);
    if (t.is_zero()) continue;
    // accumulate over all index tuples (a_1..a_s)
    std::map<std::pair<std::size_t, ForcingMonomial>, Scalar> acc;
    std::vector<std::size_t> idx(s, 0);
    while (true) {
      ForcingMonomial mono;
      std::vector<int> ind;
      for (unsigned r = 0; r < s; ++r) {
        ++mono[Source{idx[r], parts[r]}];
        ind.push_back(static_cast<int>(idx[r]));
      }
      MultiIndex alpha = MultiIndex::from_indices(n, ind);
      for (std::size_t j = 0; j < n; ++j) {
        Scalar v = t.entry(j, alpha);
        if (v.is_zero()) continue;
        auto key = std::make_pair(j, mono);
        auto it = acc.find(key);
        if (it == acc.end()) acc.emplace(key, c * v);
        else it->second += c * v;
      }
      std::size_t r = 0;
      while (r < s && ++idx[r] == n) idx[r++] = 0;
      if (r == s) break;
    }
    for (auto& [key, v] : acc) terms.push_back({key.first, v, k - 1 - static_cast<int>(s), key.second});
  }
  return canonicalize(std::move(terms), tol);
}

/// VE_1 .. VE_{p_max} in the Hessian eigenbasis; requires γ = 1.
inline std::vector<VESystem> build_ve_chain(const EigenTensors& tensors, unsigned p_max, bool allow_jordan = false,
                                            double tol = 0.0) {
  const DarbouxData& data = tensors.data();
  if (p_max < 1) fail(ErrorCode::InvalidOrder, "p_max must be at least 1");
  if (!data.normalized) fail(ErrorCode::InvalidArgument, "Darboux data must be normalized (γ = 1)");
  if (!data.diagonalizable && !allow_jordan) fail(ErrorCode::NotDiagonalizable, "Hessian at the Darboux point is not diagonalizable");
  std::vector<VESystem> chain;
  for (unsigned p = 1; p <= p_max; ++p) {
    VESystem sys;
    sys.order = p;
    sys.n = data.n();
    sys.k = data.k;
    sys.eigenvalues = data.eigenvalues;
    sys.jordan_coupling = data.jordan_coupling;
    sys.forcing = ve_forcing(tensors, p, data.k, tol);
    sys.label = "VE" + std::to_string(p);
    chain.push_back(std::move(sys));
  }
  return chain;
}

inline std::vector<VESystem> build_ve_chain(const HomogeneousPotential& V, const DarbouxData& data, unsigned p_max) {
  return build_ve_chain(EigenTensors(V, data), p_max);
}

// ---------------------------------------------------------------------------
// Distinguished subsystems of VE_2.

namespace detail {

inline const VESystem& find_order(const std::vector<VESystem>& chain, unsigned p) {
  for (const auto& s : chain)
    if (s.order == p) return s;
  fail(ErrorCode::InvalidOrder, "chain does not contain VE" + std::to_string(p));
}

inline void check_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) fail(ErrorCode::IndexOutOfRange, std::string(what) + " index out of range");
}

inline VESystem filtered(const VESystem& ve2, std::vector<std::size_t> sources, std::size_t target,
                         const std::function<bool(const ForcingMonomial&)>& keep, std::string label) {
  VESystem out = ve2;
  out.forcing.clear();
  for (const auto& t : ve2.forcing)
    if (t.target == target && keep(t.monomial)) out.forcing.push_back(t);
  out.active_sources = std::move(sources);
  out.active_targets = {target};
  out.label = std::move(label);
  return out;
}

inline bool only_sources(const ForcingMonomial& m, const std::vector<std::size_t>& allowed) {
  for (const auto& [s, e] : m)
    if (s.order != 1 || std::find(allowed.begin(), allowed.end(), s.component) == allowed.end()) return false;
  return true;
}

}  // namespace detail

/// VE_{2,α}^γ: ẍ = -λ_α φ^{k-2} x, z̈ = -λ_γ φ^{k-2} z + φ^{k-3} θ^γ_{αα} x².
inline VESystem extract_ve2_alpha(const std::vector<VESystem>& chain, std::size_t alpha, std::size_t gamma) {
  const VESystem& ve2 = detail::find_order(chain, 2);
  detail::check_index(alpha, ve2.n, "alpha");
  detail::check_index(gamma, ve2.n, "gamma");
  return detail::filtered(
      ve2, {alpha}, gamma, [&](const ForcingMonomial& m) { return detail::only_sources(m, {alpha}); },
      "VE2_alpha(" + std::to_string(alpha + 1) + "," + std::to_string(gamma + 1) + ")");
}

/// VE_{2,(α,β)}^γ: forcing restricted to the sources α and β.
inline VESystem extract_ve2_alpha_beta(const std::vector<VESystem>& chain, std::size_t alpha, std::size_t beta,
                                       std::size_t gamma) {
  const VESystem& ve2 = detail::find_order(chain, 2);
  detail::check_index(alpha, ve2.n, "alpha");
  detail::check_index(beta, ve2.n, "beta");
  detail::check_index(gamma, ve2.n, "gamma");
  if (alpha == beta) fail(ErrorCode::AlphaEqualsBeta, "alpha and beta must differ");
  return detail::filtered(
      ve2, {std::min(alpha, beta), std::max(alpha, beta)}, gamma,
      [&](const ForcingMonomial& m) { return detail::only_sources(m, {alpha, beta}); },
      "VE2_alpha_beta(" + std::to_string(alpha + 1) + "," + std::to_string(beta + 1) + "," + std::to_string(gamma + 1) + ")");
}

/// EX_{2,(α,β)}^γ: only the cross term 2 φ^{k-3} θ^γ_{αβ} x_α x_β.
inline VESystem extract_ex2(const std::vector<VESystem>& chain, std::size_t alpha, std::size_t beta, std::size_t gamma) {
  if (alpha == beta) fail(ErrorCode::AlphaEqualsBeta, "alpha and beta must differ");
  const VESystem& ve2 = detail::find_order(chain, 2);
  detail::check_index(alpha, ve2.n, "alpha");
  detail::check_index(beta, ve2.n, "beta");
  detail::check_index(gamma, ve2.n, "gamma");
  ForcingMonomial cross{{Source{alpha, 1}, 1}, {Source{beta, 1}, 1}};
  return detail::filtered(
      ve2, {std::min(alpha, beta), std::max(alpha, beta)}, gamma, [&](const ForcingMonomial& m) { return m == cross; },
      "EX2(" + std::to_string(alpha + 1) + "," + std::to_string(beta + 1) + "," + std::to_string(gamma + 1) + ")");
}

/// Sum of forcings for systems sharing one linear part.
inline VESystem sum_forcing(const std::vector<VESystem>& parts, std::size_t active_superset_from = 0) {
  (void)active_superset_from;
  if (parts.empty()) fail(ErrorCode::InvalidArgument, "no systems to add");
  VESystem out = parts[0];
  out.forcing.clear();
  for (const auto& s : parts) out.forcing.insert(out.forcing.end(), s.forcing.begin(), s.forcing.end());
  out.forcing = canonicalize(out.forcing);
  return out;
}

/// A particular solution sampled on a fixed grid: values[t][component].
struct SampledSolution {
  VESystem system;
  std::vector<std::vector<Scalar>> values;
};

/// Superposition: the sum solves the system whose forcing is the sum of the
/// forcings. All inputs must share the linear part and the sample grid.
inline SampledSolution superpose(const std::vector<SampledSolution>& parts) {
  if (parts.empty()) fail(ErrorCode::InvalidArgument, "nothing to superpose");
  SampledSolution out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& s = parts[i];
    // EX and single-source systems embed in the two-source system: compare
    // order, k, spectrum and target only.
    const VESystem& a = out.system;
    const VESystem& b = s.system;
    if (a.order != b.order || a.n != b.n || a.k != b.k || a.eigenvalues != b.eigenvalues ||
        a.jordan_coupling != b.jordan_coupling || a.active_targets != b.active_targets)
      fail(ErrorCode::LinearPartMismatch, "superposed systems have different linear parts");
    if (s.values.size() != out.values.size()) fail(ErrorCode::LinearPartMismatch, "sample grids differ");
    for (std::size_t t = 0; t < s.values.size(); ++t) {
      if (s.values[t].size() != out.values[t].size()) fail(ErrorCode::LinearPartMismatch, "sample widths differ");
      for (std::size_t c = 0; c < s.values[t].size(); ++c) out.values[t][c] += s.values[t][c];
    }
    out.system.forcing.insert(out.system.forcing.end(), b.forcing.begin(), b.forcing.end());
    std::vector<std::size_t> src = out.system.active_sources;
    src.insert(src.end(), b.active_sources.begin(), b.active_sources.end());
    std::sort(src.begin(), src.end());
    src.erase(std::unique(src.begin(), src.end()), src.end());
    out.system.active_sources = src;
  }
  out.system.forcing = canonicalize(out.system.forcing);
  return out;
}

}  // namespace vega
