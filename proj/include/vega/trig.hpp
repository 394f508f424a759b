#pragma once

#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "vega/scalar.hpp"

namespace vega {

/// Σ coef · e^{iωt} sin^a t cos^b t with a ∈ ℤ and b ∈ {0, 1} (cos² = 1 − sin²).
class TrigExpr {
 public:
  using Key = std::pair<int, unsigned>;  // (sin power, cos power)

  TrigExpr() = default;
  explicit TrigExpr(Scalar omega) : omega_(std::move(omega)) {}

  const Scalar& omega() const { return omega_; }
  const std::map<Key, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(int sin_power, unsigned cos_power, const Scalar& c) {
    if (c.is_zero()) return;
    if (cos_power >= 2) {
      add(sin_power, cos_power - 2, c);
      add(sin_power + 2, cos_power - 2, -c);
      return;
    }
    Key key{sin_power, cos_power};
    auto it = terms_.find(key);
    if (it == terms_.end()) terms_.emplace(key, c);
    else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Scalar coefficient(int sin_power, unsigned cos_power) const {
    auto it = terms_.find({sin_power, cos_power});
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  /// d/dt(e^{iωt} s^a c^b) = iω e s^a c^b + a e s^{a-1} c^{b+1} − b e s^{a+1} c^{b-1}.
  TrigExpr derivative() const {
    TrigExpr out(omega_);
    Scalar iw = Scalar::i() * omega_;
    for (const auto& [key, c] : terms_) {
      auto [a, b] = key;
      out.add(a, b, iw * c);
      if (a != 0) out.add(a - 1, b + 1, Scalar(a) * c);
      if (b != 0) out.add(a + 1, b - 1, -Scalar(static_cast<int>(b)) * c);
    }
    return out;
  }

  std::complex<double> evaluate(std::complex<double> t) const {
    std::complex<double> s = std::sin(t), co = std::cos(t), acc = 0;
    for (const auto& [key, c] : terms_) acc += c.to_complex() * std::pow(s, key.first) * std::pow(co, static_cast<int>(key.second));
    return std::exp(std::complex<double>(0, 1) * omega_.to_complex() * t) * acc;
  }

  TrigExpr operator+(const TrigExpr& o) const {
    if (!is_zero() && !o.is_zero() && !(omega_ == o.omega_)) fail(ErrorCode::InvalidArgument, "frequencies differ");
    TrigExpr out = is_zero() ? TrigExpr(o.omega_) : *this;
    for (const auto& [key, c] : o.terms_) out.add(key.first, key.second, c);
    return out;
  }
  friend TrigExpr operator*(const Scalar& s, const TrigExpr& e) {
    TrigExpr out(e.omega_);
    for (const auto& [key, c] : e.terms_) out.add(key.first, key.second, s * c);
    return out;
  }
  friend bool operator==(const TrigExpr& a, const TrigExpr& b) {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    return a.omega_ == b.omega_ && a.terms_ == b.terms_;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [key, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.to_string() + ")*sin^" + std::to_string(key.first) + (key.second ? "*cos" : "");
    }
    return "exp(i*" + omega_.to_string() + "*t)*[" + s + "]";
  }

 private:
  Scalar omega_;
  std::map<Key, Scalar> terms_;
};

/// Integrand e^{iωt} / sin^n t of T_n^(ω).
inline TrigExpr t_integrand(unsigned n, const Scalar& omega) {
  TrigExpr e(omega);
  e.add(-static_cast<int>(n), 0, Scalar(1));
  return e;
}

struct RecurrenceStep {
  unsigned n;
  /// g_{n-2}: coefficients of e^{iωt} sin^a t cos^b t.
  TrigExpr g;
  /// c_{n-2} = ((n−2)² − ω²) / ((n−1)(n−2)).
  Scalar c;
};

/// T_n = g_{n-2} + c_{n-2} T_{n-2} for n > 2.
inline RecurrenceStep recurrence_step(unsigned n, const Scalar& omega) {
  if (n <= 2) fail(ErrorCode::InvalidOrder, "recurrence needs n > 2");
  Scalar m(static_cast<long long>(n - 2));
  Scalar den(static_cast<long long>((n - 1) * (n - 2)));
  TrigExpr g(omega);
  int top = -static_cast<int>(n - 1);
  g.add(top + 1, 0, -(Scalar::i() * omega) / den);
  g.add(top, 1, -m / den);
  return {n, g, (m * m - omega * omega) / den};
}

struct Reduction {
  unsigned n;
  /// Meromorphic f_n with T_n = f_n + p T_tail.
  TrigExpr meromorphic_part;
  unsigned tail_order;
  /// Product of the recurrence coefficients.
  Scalar p;
  /// a_n ∏[(2k)² − ω²] (even n) or a_n ∏[(2k+1)² − ω²] (odd n); the even
  /// product carries the extra k = 0 factor −ω² encoding T_2's own condition.
  Scalar p_product;
  Scalar a_n;
};

inline Reduction reduce(unsigned n, const Scalar& omega) {
  if (n < 1) fail(ErrorCode::InvalidOrder, "reduce needs n ≥ 1");
  Reduction r{n, TrigExpr(omega), n % 2 ? 1u : 2u, Scalar(1), Scalar(1), Scalar(1)};
  Scalar running(1);
  for (unsigned m = n; m > 2; m -= 2) {
    auto step = recurrence_step(m, omega);
    r.meromorphic_part = r.meromorphic_part + running * step.g;
    running = running * step.c;
    r.a_n = r.a_n / Scalar(static_cast<long long>((m - 1) * (m - 2)));
  }
  r.p = running;
  r.p_product = r.p;
  if (n % 2 == 0) r.p_product = r.p_product * (-omega * omega);
  return r;
}

/// Residue of e^{iωt}/sin^n t at t = 0: [t^{n-1}] e^{iωt} (t / sin t)^n.
inline Scalar laurent_residue(unsigned n, const Scalar& omega) {
  if (n == 0) return Scalar(0);
  std::size_t len = n;
  // sin t / t = Σ (−1)^j t^{2j} / (2j+1)!
  std::vector<Scalar> s(len, Scalar(0));
  BigInt f = 1;
  for (std::size_t j = 0; 2 * j < len; ++j) {
    if (j > 0) f *= BigInt((2 * j) * (2 * j + 1));
    s[2 * j] = Scalar(Rational(j % 2 ? -1 : 1, 1) / Rational(f));
  }
  // inverse series
  std::vector<Scalar> inv(len, Scalar(0));
  inv[0] = Scalar(1);
  for (std::size_t k = 1; k < len; ++k) {
    Scalar acc(0);
    for (std::size_t j = 1; j <= k; ++j)
      if (!s[j].is_zero()) acc += s[j] * inv[k - j];
    inv[k] = -acc;
  }
  auto mul = [&](const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
    std::vector<Scalar> out(len, Scalar(0));
    for (std::size_t i = 0; i < len; ++i)
      if (!a[i].is_zero())
        for (std::size_t j = 0; i + j < len; ++j)
          if (!b[j].is_zero()) out[i + j] += a[i] * b[j];
    return out;
  };
  std::vector<Scalar> pw(len, Scalar(0));
  pw[0] = Scalar(1);
  for (unsigned i = 0; i < n; ++i) pw = mul(pw, inv);
  std::vector<Scalar> ex(len, Scalar(0));
  Scalar term(1), iw = Scalar::i() * omega;
  for (std::size_t j = 0; j < len; ++j) {
    ex[j] = term;
    term = term * iw / Scalar(static_cast<long long>(j + 1));
  }
  return mul(ex, pw)[len - 1];
}

enum class MeromorphyReason { ClassifierEven, ClassifierOdd, SimplePoleJump, ProductZero };

inline std::string to_string(MeromorphyReason r) {
  switch (r) {
    case MeromorphyReason::ClassifierEven: return "ClassifierEven";
    case MeromorphyReason::ClassifierOdd: return "ClassifierOdd";
    case MeromorphyReason::SimplePoleJump: return "SimplePoleJump";
    case MeromorphyReason::ProductZero: return "ProductZero";
  }
  return "?";
}

struct MeromorphyVerdict {
  bool meromorphic = false;
  MeromorphyReason reason = MeromorphyReason::SimplePoleJump;
  /// Monodromy jump 2πi·res around t = 0 when not meromorphic; ω otherwise.
  Scalar witness;
  /// The published odd-n set ±(1+2k), k ≤ (n−1)/2, also contains ±n, where
  /// T_n has a nonzero residue; flagged when that set disagrees with the verdict.
  bool published_set_discrepancy = false;
};

namespace detail {

inline bool published_set_contains(unsigned n, const Scalar& omega, double tol) {
  auto hit = [&](long long v) { return (omega - Scalar(v)).approx_zero(tol); };
  if (n % 2 == 0) {
    for (long long k = 0; 2 * k <= static_cast<long long>(n) - 2; ++k)
      if (hit(2 * k) || hit(-2 * k)) return true;
  } else if (n >= 3) {
    for (long long k = 0; 2 * k <= static_cast<long long>(n) - 1; ++k)
      if (hit(1 + 2 * k) || hit(-(1 + 2 * k))) return true;
  }
  return false;
}

}  // namespace detail

/// Exact verdict for T_n^(ω). `certified_irrational` short-circuits to the
/// non-integer branch when ω is only known in floating point.
inline MeromorphyVerdict classify_meromorphy(unsigned n, const Scalar& omega, double tol = default_tolerance,
                                             bool certified_irrational = false) {
  if (n < 1) fail(ErrorCode::InvalidOrder, "T_n needs n ≥ 1");
  MeromorphyVerdict v;
  auto red = reduce(n, omega);
  bool mero;
  if (certified_irrational) mero = false;
  else if (n % 2 == 0) mero = red.p.approx_zero(tol) || omega.approx_zero(tol);
  else mero = red.p.approx_zero(tol);
  v.meromorphic = mero;
  if (n == 1) v.reason = MeromorphyReason::SimplePoleJump;
  else if (mero && n > 2) v.reason = MeromorphyReason::ProductZero;
  else v.reason = n % 2 ? MeromorphyReason::ClassifierOdd : MeromorphyReason::ClassifierEven;
  if (mero) v.witness = omega;
  else {
    Scalar res = laurent_residue(n, omega);
    v.witness = Scalar::from_complex(2.0 * std::numbers::pi * std::complex<double>(0, 1) * res.to_complex());
  }
  if (!certified_irrational) v.published_set_discrepancy = detail::published_set_contains(n, omega, tol) != mero;
  return v;
}

/// Additive monodromy of ∫ f / sin around t = nπ: 2πi (−1)^n f(nπ).
inline Scalar monodromy_jump(const std::function<std::complex<double>(std::complex<double>)>& f, long long n) {
  std::complex<double> at = f(std::complex<double>(std::numbers::pi * static_cast<double>(n), 0));
  double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return Scalar::from_complex(sign * 2.0 * std::numbers::pi * std::complex<double>(0, 1) * at);
}

// ---------------------------------------------------------------------------
// Second level integrals ∫ t^d e^{iωt} / sin t.

enum class TrigKind { T, P, M };

struct TrigIntegralSpec {
  TrigKind kind = TrigKind::T;
  Scalar omega;
  unsigned d = 0;
  unsigned n = 1;

  static TrigIntegralSpec trigonometric(Scalar w, unsigned n = 1) { return {TrigKind::T, std::move(w), 0, n}; }
  static TrigIntegralSpec polynomial(unsigned d) { return {TrigKind::P, Scalar(0), d, 1}; }
  static TrigIntegralSpec mixed(unsigned d, Scalar w) { return {TrigKind::M, std::move(w), d, 1}; }

  /// T_0 = P_0 = M_{0,0} and the like compare equal.
  friend bool operator==(const TrigIntegralSpec& a, const TrigIntegralSpec& b) {
    return a.omega == b.omega && a.d == b.d && a.n == b.n;
  }

  /// Numerator f with the integral equal to ∫ f / sin^n.
  std::function<std::complex<double>(std::complex<double>)> numerator() const {
    std::complex<double> w = omega.to_complex();
    unsigned deg = d;
    return [w, deg](std::complex<double> t) { return std::pow(t, static_cast<int>(deg)) * std::exp(std::complex<double>(0, 1) * w * t); };
  }
};

/// Verdict for a TrigIntegralSpec: T_n goes through the classifier, the n = 1 integrals
/// through the jump at the first pole where t^d e^{iωt} is nonzero.
inline MeromorphyVerdict classify(const TrigIntegralSpec& s, double tol = default_tolerance) {
  if (s.d == 0) return classify_meromorphy(s.n, s.omega, tol);
  if (s.n != 1) fail(ErrorCode::InvalidArgument, "polynomial and mixed integrals have a simple sine denominator");
  MeromorphyVerdict v;
  v.reason = MeromorphyReason::SimplePoleJump;
  v.meromorphic = false;
  v.witness = monodromy_jump(s.numerator(), 1);
  return v;
}

}  // namespace vega
