#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>

#include "vega/scalar.hpp"

namespace vega {

/// Energy of the particular solution: φ̇² = e + 1/φ².
struct EnergyRegime {
  bool zero = true;
  Scalar e = Scalar(0);

  static EnergyRegime zero_energy() { return {}; }
  static EnergyRegime nonzero(const Scalar& e) {
    if (e.is_zero()) fail(ErrorCode::InvalidArgument, "nonzero energy regime needs e != 0");
    return {false, e};
  }
  friend bool operator==(const EnergyRegime& a, const EnergyRegime& b) {
    return a.zero == b.zero && (a.zero || a.e == b.e);
  }
  std::string to_string() const { return zero ? "e=0" : "e=" + e.to_string(); }
};

struct BKey {
  unsigned m = 0;
  Scalar omega;
};

struct BKeyLess {
  bool operator()(const BKey& a, const BKey& b) const {
    if (a.m != b.m) return a.m < b.m;
    return canonical_less(a.omega, b.omega);
  }
};

/// Finite sums Σ c · I^m E_ω.
class BElement {
 public:
  using Terms = std::map<BKey, Scalar, BKeyLess>;

  BElement() = default;
  explicit BElement(EnergyRegime r) : regime_(std::move(r)) {}

  static BElement unit(const EnergyRegime& r) { return term(r, 0, Scalar(0), Scalar(1)); }
  static BElement I(const EnergyRegime& r, unsigned m = 1) { return term(r, m, Scalar(0), Scalar(1)); }
  static BElement E(const EnergyRegime& r, const Scalar& omega) { return term(r, 0, omega, Scalar(1)); }
  static BElement term(const EnergyRegime& r, unsigned m, const Scalar& omega, const Scalar& c) {
    BElement b(r);
    b.add(m, omega, c);
    return b;
  }

  const EnergyRegime& regime() const { return regime_; }
  const Terms& terms() const { return terms_; }
  bool is_zero(double tol = 0.0) const {
    for (const auto& [k, c] : terms_)
      if (!c.approx_zero(tol)) return false;
    return true;
  }

  /// Float ω keys within `merge_tol` of an existing key with the same m are merged.
  void add(unsigned m, const Scalar& omega, const Scalar& c, double merge_tol = 1e-12) {
    if (c.is_zero()) return;
    BKey key{m, omega};
    auto it = terms_.find(key);
    if (it == terms_.end() && omega.is_float()) {
      for (auto jt = terms_.begin(); jt != terms_.end(); ++jt)
        if (jt->first.m == m && (jt->first.omega - omega).abs() < merge_tol) {
          it = jt;
          break;
        }
    }
    if (it == terms_.end()) terms_.emplace(key, c);
    else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Scalar coefficient(unsigned m, const Scalar& omega) const {
    auto it = terms_.find(BKey{m, omega});
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  unsigned max_log_degree() const {
    unsigned d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.m);
    return d;
  }

  BElement operator+(const BElement& o) const {
    check_regime(o);
    BElement out = *this;
    for (const auto& [k, c] : o.terms_) out.add(k.m, k.omega, c);
    return out;
  }
  BElement operator-() const { return Scalar(-1) * *this; }
  BElement operator-(const BElement& o) const { return *this + (-o); }
  friend BElement operator*(const Scalar& s, const BElement& b) {
    BElement out(b.regime_);
    if (s.is_zero()) return out;
    for (const auto& [k, c] : b.terms_) out.add(k.m, k.omega, s * c);
    return out;
  }
  /// (I^m E_ω)(I^m′ E_ω′) = I^{m+m′} E_{ω+ω′}.
  BElement operator*(const BElement& o) const {
    check_regime(o);
    BElement out(regime_);
    for (const auto& [a, ca] : terms_)
      for (const auto& [b, cb] : o.terms_) out.add(a.m + b.m, a.omega + b.omega, ca * cb);
    return out;
  }
  BElement pow(unsigned e) const {
    BElement out = unit(regime_);
    for (unsigned i = 0; i < e; ++i) out = out * *this;
    return out;
  }

  /// D = φ² d/dt: D(I^m E_ω) = 2m I^{m−1} E_ω + 2ω I^m E_ω.
  BElement derivative() const {
    BElement out(regime_);
    for (const auto& [k, c] : terms_) {
      if (k.m > 0) out.add(k.m - 1, k.omega, Scalar(2 * static_cast<long long>(k.m)) * c);
      if (!k.omega.is_zero()) out.add(k.m, k.omega, Scalar(2) * k.omega * c);
    }
    return out;
  }

  friend bool operator==(const BElement& a, const BElement& b) {
    return a.regime_ == b.regime_ && (a - b).is_zero();
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [k, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.to_string() + ")";
      if (k.m) s += "*I^" + std::to_string(k.m);
      if (!k.omega.is_zero()) s += "*E[" + k.omega.to_string() + "]";
    }
    return s;
  }

 private:
  void check_regime(const BElement& o) const {
    if (!(regime_ == o.regime_)) fail(ErrorCode::RegimeMismatch, "energy regimes differ");
  }

  EnergyRegime regime_;
  Terms terms_;
};

inline BElement b_mul(const BElement& a, const BElement& b) { return a * b; }

/// Φ with φ² Φ̇ = b: Φ^(m)_0 = I^{m+1}/(2(m+1)); for ω ≠ 0
/// 2ω Φ^(m)_ω = I^m E_ω − 2m Φ^(m−1)_ω.
inline BElement integrate_over_phi2(const BElement& b) {
  BElement out(b.regime());
  for (const auto& [k, c] : b.terms()) {
    if (k.omega.is_zero()) {
      out.add(k.m + 1, k.omega, c / Scalar(2 * static_cast<long long>(k.m + 1)));
      continue;
    }
    // Φ^(m) = Σ_{j=0}^{m} (−2)^j m!/(m−j)! I^{m−j} E_ω / (2ω)^{j+1}
    Scalar two_w = Scalar(2) * k.omega;
    Scalar coef = c / two_w;
    for (unsigned j = 0; j <= k.m; ++j) {
      out.add(k.m - j, k.omega, coef);
      coef = coef * Scalar(-2 * static_cast<long long>(k.m - j)) / two_w;
    }
  }
  return out;
}

/// Evaluates φ, φ̇, I, E_ω on the principal branch.
class PhiBasis {
 public:
  using cd = std::complex<double>;

  explicit PhiBasis(EnergyRegime r, double branch_tol = 1e-9) : r_(std::move(r)), tol_(branch_tol) {}

  const EnergyRegime& regime() const { return r_; }

  cd phi(cd t) const {
    check(t);
    if (r_.zero) return std::sqrt(2.0 * t);
    cd e = r_.e.to_complex();
    return std::sqrt(e * t * t - 1.0 / e);
  }
  cd phi_dot(cd t) const {
    if (r_.zero) return 1.0 / phi(t);
    return r_.e.to_complex() * t / phi(t);
  }
  cd log_argument(cd t) const {
    check(t);
    if (r_.zero) return t;
    cd e = r_.e.to_complex();
    return (e * t - 1.0) / (e * t + 1.0);
  }
  cd I(cd t) const { return std::log(log_argument(t)); }
  cd E(const Scalar& omega, cd t) const { return std::exp(omega.to_complex() * I(t)); }

  void check(cd t) const {
    if (r_.zero) {
      if (std::abs(t) < tol_) fail(ErrorCode::BranchPoint, "t = 0 is a branch point for e = 0");
    } else {
      cd inv = 1.0 / r_.e.to_complex();
      if (std::abs(t - inv) < tol_ || std::abs(t + inv) < tol_)
        fail(ErrorCode::BranchPoint, "t = ±1/e is a branch point");
    }
  }

 private:
  EnergyRegime r_;
  double tol_;
};

inline std::complex<double> eval_belement(const BElement& b, std::complex<double> t) {
  PhiBasis basis(b.regime());
  std::complex<double> logu = basis.I(t), acc = 0;
  for (const auto& [k, c] : b.terms())
    acc += c.to_complex() * std::pow(logu, static_cast<int>(k.m)) * std::exp(k.omega.to_complex() * logu);
  return acc;
}

inline Scalar eval_belement(const BElement& b, const Scalar& t) { return Scalar::from_complex(eval_belement(b, t.to_complex())); }

}  // namespace vega
