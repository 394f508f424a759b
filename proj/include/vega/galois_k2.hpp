#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vega/parallel.hpp"
#include "vega/trig.hpp"
#include "vega/vebuild.hpp"

namespace vega {

enum class Status { VirtuallyAbelian, NotVirtuallyAbelian, Inconclusive };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::VirtuallyAbelian: return "VirtuallyAbelian";
    case Status::NotVirtuallyAbelian: return "NotVirtuallyAbelian";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Offending data behind a verdict. Indices are 0-based here.
struct Witness {
  std::string subsystem;  // "VE2_alpha", "EX2" or "VE<p>"
  std::optional<std::size_t> alpha, beta, gamma;
  std::optional<MultiIndex> multi_index;  // ξ entry for order-p witnesses
  Scalar coefficient;                     // θ or ξ
  std::vector<FrequencyTag> tags;
  int table_case = 0;  // row of the frequency case table, 0 if not applicable
  std::optional<TrigIntegralSpec> integral;
  std::optional<MeromorphyVerdict> integral_verdict;
};

struct Verdict {
  Status status = Status::VirtuallyAbelian;
  std::optional<Witness> witness;
  unsigned order_reached = 0;
};

// ---------------------------------------------------------------------------
// Frequency combinations.

/// Tag of Σ c_i ω_i. Exact frequencies are grouped into classes with rational
/// ratios; square roots from distinct classes are linearly independent over ℚ.
inline FrequencyTag combination_tag(const std::vector<Frequency>& f, const std::vector<long long>& c) {
  std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i)
    if (c[i] != 0 && f[i].tag == FrequencyTag::Undetermined) return FrequencyTag::Undetermined;
  Rational rational_part = 0;
  std::vector<bool> done(n, false);
  bool irrational = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i] || c[i] == 0) continue;
    if (f[i].rational) {
      rational_part += Rational(c[i]) * *f[i].rational;
      done[i] = true;
      continue;
    }
    Rational total = c[i];
    done[i] = true;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (done[j] || c[j] == 0 || f[j].rational) continue;
      if (auto r = rational_ratio(f[j], f[i])) {
        total += Rational(c[j]) * *r;
        done[j] = true;
      }
    }
    if (total != 0) irrational = true;
  }
  if (irrational) return FrequencyTag::Irrational;
  return rational_part == 0 ? FrequencyTag::Zero : FrequencyTag::NonzeroRational;
}

inline Scalar combination_value(const std::vector<Frequency>& f, const std::vector<long long>& c) {
  Scalar v(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (c[i] != 0) v += Scalar(c[i]) * f[i].omega;
  return v;
}

namespace detail {

inline bool in_qstar(FrequencyTag t) { return t == FrequencyTag::NonzeroRational; }
inline bool certified_bad(FrequencyTag t) { return t == FrequencyTag::Zero || t == FrequencyTag::Irrational; }
inline bool zero(FrequencyTag t) { return t == FrequencyTag::Zero; }

inline Witness integral_witness(Witness w, const std::vector<Frequency>& f, const std::vector<long long>& c,
                                unsigned d = 0) {
  Scalar omega = combination_value(f, c);
  w.integral = d == 0 ? TrigIntegralSpec::trigonometric(omega) : TrigIntegralSpec::mixed(d, omega);
  w.integral_verdict = classify(*w.integral);
  return w;
}

/// First combination among `candidates` certified irrational (else the first).
inline std::vector<long long> irrational_combination(const std::vector<Frequency>& f,
                                                     const std::vector<std::vector<long long>>& candidates) {
  for (const auto& c : candidates)
    if (combination_tag(f, c) == FrequencyTag::Irrational) return c;
  return candidates.front();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subsystem criteria.

/// VE_{2,α}^γ is virtually Abelian iff θ = 0 or ω_α, ω_γ ∈ ℚ*.
inline Verdict check_ve2_alpha(const Scalar& theta, const Frequency& wa, const Frequency& wg,
                               double tol = default_tolerance) {
  Verdict v;
  v.order_reached = 2;
  if (theta.approx_zero(tol)) return v;
  Witness w;
  w.subsystem = "VE2_alpha";
  w.coefficient = theta;
  w.tags = {wa.tag, wg.tag};
  if (detail::in_qstar(wa.tag) && detail::in_qstar(wg.tag)) return v;
  if (!detail::certified_bad(wa.tag) && !detail::certified_bad(wg.tag)) {
    v.status = Status::Inconclusive;
    v.witness = w;
    return v;
  }
  v.status = Status::NotVirtuallyAbelian;
  std::vector<Frequency> f{wa, wg};
  bool za = detail::zero(wa.tag), zg = detail::zero(wg.tag);
  if (za && zg) {
    w.table_case = 1;
    v.witness = detail::integral_witness(w, f, {0, 0});
  } else if (za) {
    w.table_case = 2;
    v.witness = detail::integral_witness(w, f, {0, 1});
  } else if (zg) {
    w.table_case = 3;
    v.witness = detail::integral_witness(w, f, {2, 0});
  } else {
    w.table_case = 4;
    v.witness = detail::integral_witness(w, f, detail::irrational_combination(f, {{0, 1}, {2, 1}, {2, -1}}));
  }
  return v;
}

/// EX_{2,(α,β)}^γ is virtually Abelian iff θ = 0 or ω_α, ω_β, ω_γ ∈ ℚ*.
inline Verdict check_ex2(const Scalar& theta, const Frequency& wa, const Frequency& wb, const Frequency& wg,
                         double tol = default_tolerance) {
  Verdict v;
  v.order_reached = 2;
  if (theta.approx_zero(tol)) return v;
  Witness w;
  w.subsystem = "EX2";
  w.coefficient = theta;
  w.tags = {wa.tag, wb.tag, wg.tag};
  if (detail::in_qstar(wa.tag) && detail::in_qstar(wb.tag) && detail::in_qstar(wg.tag)) return v;
  if (!detail::certified_bad(wa.tag) && !detail::certified_bad(wb.tag) && !detail::certified_bad(wg.tag)) {
    v.status = Status::Inconclusive;
    v.witness = w;
    return v;
  }
  v.status = Status::NotVirtuallyAbelian;
  // α and β play symmetric roles: order them so a zero source comes second.
  std::vector<Frequency> f{wa, wb, wg};
  bool swap = detail::zero(wa.tag) && !detail::zero(wb.tag);
  if (swap) std::swap(f[0], f[1]);
  bool za = detail::zero(f[0].tag), zb = detail::zero(f[1].tag), zg = detail::zero(f[2].tag);
  auto unswap = [&](std::vector<long long> c) {
    if (swap) std::swap(c[0], c[1]);
    return c;
  };
  std::vector<Frequency> orig{wa, wb, wg};
  if (za && zb && zg) {
    w.table_case = 1;
    v.witness = detail::integral_witness(w, orig, {0, 0, 0});
  } else if (za && zb) {
    w.table_case = 2;
    v.witness = detail::integral_witness(w, orig, {0, 0, 1});
  } else if (zb && zg) {
    w.table_case = 3;
    v.witness = detail::integral_witness(w, orig, unswap({1, 0, 0}));
  } else if (zb) {
    w.table_case = 4;
    v.witness = detail::integral_witness(w, orig, unswap({1, 0, 1}));
  } else if (zg) {
    w.table_case = 5;
    v.witness = detail::integral_witness(w, orig, {1, 1, 0});
  } else {
    w.table_case = 6;
    v.witness = detail::integral_witness(
        w, orig, detail::irrational_combination(orig, {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}}));
  }
  return v;
}

// ---------------------------------------------------------------------------
// VE_2 verdict.

namespace detail {

inline void require_k2(const DarbouxData& data) {
  if (data.k != 2) fail(ErrorCode::InvalidArgument, "this analysis requires degree k = 2");
  if (!data.diagonalizable) fail(ErrorCode::NotDiagonalizable, "Hessian at the Darboux point is not diagonalizable");
  if (!data.normalized) fail(ErrorCode::InvalidArgument, "Darboux data must be normalized (γ = 1)");
}

/// NotVirtuallyAbelian dominates, then Inconclusive; the first such verdict in
/// sweep order is kept as witness.
inline Verdict aggregate(const std::vector<Verdict>& parts, unsigned order) {
  Verdict out;
  out.order_reached = order;
  for (Status s : {Status::NotVirtuallyAbelian, Status::Inconclusive})
    for (const auto& p : parts)
      if (p.status == s) {
        out.status = s;
        out.witness = p.witness;
        return out;
      }
  return out;
}

}  // namespace detail

/// Aggregates VE_{2,α}^γ and EX_{2,(α,β)}^γ over all triples, sweeping γ, then
/// α, then β (with the single-source system first).
inline Verdict verdict_ve2(const HomogeneousPotential& V, const DarbouxData& data, double tol = default_tolerance) {
  detail::require_k2(data);
  const std::size_t n = data.n();
  SymmetricTensor theta = coupling_theta(V, data);
  struct Job {
    std::size_t g, a;
    std::optional<std::size_t> b;
  };
  std::vector<Job> jobs;
  for (std::size_t g = 0; g < n; ++g)
    for (std::size_t a = 0; a < n; ++a) {
      jobs.push_back({g, a, std::nullopt});
      for (std::size_t b = a + 1; b < n; ++b) jobs.push_back({g, a, b});
    }
  auto parts = parallel_map<Verdict>(jobs.size(), [&](std::size_t i) {
    const Job& j = jobs[i];
    Verdict v;
    if (!j.b) {
      v = check_ve2_alpha(theta.entry(j.g, std::vector<int>{int(j.a), int(j.a)}), data.frequencies[j.a],
                          data.frequencies[j.g], tol);
    } else {
      v = check_ex2(theta.entry(j.g, std::vector<int>{int(j.a), int(*j.b)}), data.frequencies[j.a],
                    data.frequencies[*j.b], data.frequencies[j.g], tol);
      if (v.witness) v.witness->beta = *j.b;
    }
    if (v.witness) {
      v.witness->alpha = j.a;
      v.witness->gamma = j.g;
    }
    return v;
  });
  return detail::aggregate(parts, 2);
}

// ---------------------------------------------------------------------------
// Inductive analysis under ℤ-independence.

struct Certificate {
  unsigned p_max = 0;
  /// ξ tables per order p (index p − 2), every entry confirmed zero.
  std::vector<std::vector<std::map<MultiIndex, Scalar, GradedLex>>> xi_tables;
  /// euler_chain[m] = ∂^m_d V(d) for m = 2 .. p_max + 1 (index m − 2).
  std::vector<Scalar> euler_chain;
  /// ∂^{p+1}_d V(d) = (2 − p) ∂^p_d V(d) checked for p = 2 .. p_max.
  bool euler_chain_consistent = true;
  /// Every ∂^α V(d) with 3 ≤ |α| ≤ p_max + 1 vanishes.
  bool taylor_coefficients_vanish = true;
  /// VE_{p+1} in simple form after each passed order.
  bool simple_form_propagates = true;
};

/// m-th derivative of V along d at d: Σ_{|α|=m} (m!/α!) ∂^αV(d) d^α.
inline Scalar directional_derivative(const HomogeneousPotential& V, const Point& d, unsigned m) {
  Scalar acc(0);
  BigInt mf = 1;
  for (unsigned i = 2; i <= m; ++i) mf *= i;
  for (const auto& alpha : multi_indices_of_order(d.size(), m)) {
    Scalar mono(1);
    for (std::size_t i = 0; i < d.size(); ++i) mono *= d[i].pow(alpha[i]);
    if (mono.is_zero()) continue;
    acc += Scalar(Rational(mf, alpha.factorial())) * V.partial_at(alpha, d) * mono;
  }
  return acc;
}

struct InductiveResult {
  Verdict verdict;
  Certificate certificate;
};

inline InductiveResult inductive_analysis(const HomogeneousPotential& V, const DarbouxData& data, unsigned p_max,
                                          bool asserted_independence, double tol = default_tolerance) {
  detail::require_k2(data);
  if (p_max < 2) fail(ErrorCode::InvalidOrder, "inductive analysis starts at order 2");
  auto rc = classify_resonance(data.frequencies, asserted_independence);
  if (rc.z_linear_independent != Independence::True && rc.z_linear_independent != Independence::Asserted)
    fail(ErrorCode::NonResonanceNotEstablished,
         "frequencies are not known to be Z-independent (" + std::string(to_string(rc.z_linear_independent)) + ")");

  InductiveResult out;
  Certificate& cert = out.certificate;
  cert.p_max = p_max;
  const std::size_t n = data.n(), dn = data.darboux_index;
  EigenTensors tensors(V, data);

  for (unsigned m = 2; m <= p_max + 1; ++m) cert.euler_chain.push_back(directional_derivative(V, data.d, m));
  // base ∂³ = 0·∂², then ∂^{p+1} = (2 − p) ∂^p
  for (unsigned p = 2; p <= p_max; ++p)
    if (!(cert.euler_chain[p - 1] == Scalar(2 - static_cast<int>(p)) * cert.euler_chain[p - 2]))
      cert.euler_chain_consistent = false;

  for (unsigned p = 2; p <= p_max; ++p) {
    auto xi = simple_form_xi(tensors, p, tol);
    MultiIndex pure(n);
    pure[dn] = p;
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& [alpha, value] : xi[j]) {
        if (value.approx_zero(tol)) continue;
        Witness w;
        w.subsystem = "VE" + std::to_string(p);
        w.gamma = j;
        w.multi_index = alpha;
        w.coefficient = value;
        for (const auto& f : data.frequencies) w.tags.push_back(f.tag);
        // the obstructing integral T_{p-1}^{(α·ω + ω_j)}
        std::vector<long long> c(n, 0);
        for (std::size_t i = 0; i < n; ++i) c[i] = alpha[i];
        c[j] += 1;
        Scalar omega = combination_value(data.frequencies, c);
        w.integral = TrigIntegralSpec::trigonometric(omega, p - 1);
        w.integral_verdict = classify_meromorphy(p - 1, omega, tol,
                                                 combination_tag(data.frequencies, c) == FrequencyTag::Irrational);
        if (j == dn && alpha == pure) w.subsystem += "_euler";
        out.verdict.status = Status::NotVirtuallyAbelian;
        out.verdict.witness = w;
        out.verdict.order_reached = p;
        return out;
      }
    cert.xi_tables.push_back(std::move(xi));
    // with all ξ of order ≤ p zero, VE_{p+1} forcing only involves order-1 sources
    auto next = ve_forcing(tensors, p + 1, data.k, tol);
    VESystem sys;
    sys.forcing = next;
    if (!sys.is_simple_form()) cert.simple_form_propagates = false;
  }
  for (unsigned m = 3; m <= p_max + 1 && cert.taylor_coefficients_vanish; ++m)
    for (const auto& alpha : multi_indices_of_order(n, m))
      if (!V.partial_at(alpha, data.d).approx_zero(tol)) {
        cert.taylor_coefficients_vanish = false;
        break;
      }
  out.verdict.order_reached = p_max;
  return out;
}

}  // namespace vega
