#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "vega/polynomial.hpp"

namespace vega {

/// N / (q^m * prod B_i^{e_i}). The bases B_i are monic (graded-lex leading
/// coefficient 1), free of monomial content and pairwise distinct; the
/// monomial part q^m is kept separately and cancelled against the monomial
/// content of N. No polynomial GCDs are taken.
template <class C>
class RationalFunction {
 public:
  using Poly = Polynomial<C>;
  struct Factor {
    Poly base;
    unsigned power;
  };

  RationalFunction() = default;
  explicit RationalFunction(std::size_t nvars) : num_(nvars), mono_(nvars) {}

  RationalFunction(Poly num) : num_(std::move(num)), mono_(num_.nvars()) { normalize(); }

  RationalFunction(Poly num, const Poly& den) : num_(std::move(num)), mono_(num_.nvars()) {
    if (den.is_zero()) fail(ErrorCode::DivisionByZero, "zero denominator");
    if (den.nvars() != num_.nvars()) fail(ErrorCode::InvalidArgument, "numerator/denominator arity mismatch");
    mono_ = den.monomial_content();
    append_base(den.divide_monomial(mono_), 1);
    normalize();
  }

  std::size_t nvars() const { return num_.nvars(); }
  const Poly& numerator() const { return num_; }
  const MultiIndex& denominator_monomial() const { return mono_; }
  const std::vector<Factor>& factors() const { return factors_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return mono_.order() == 0 && factors_.empty(); }

  /// Expanded denominator polynomial.
  Poly denominator() const {
    Poly d = Poly::monomial(mono_, C(1));
    for (const auto& f : factors_) d = d * f.base.pow(f.power);
    return d;
  }

  /// deg N - deg D when both are homogeneous.
  std::optional<int> homogeneous_degree() const {
    auto dn = num_.homogeneous_degree();
    if (!dn) return std::nullopt;
    int d = static_cast<int>(*dn) - static_cast<int>(mono_.order());
    for (const auto& f : factors_) {
      auto db = f.base.homogeneous_degree();
      if (!db) return std::nullopt;
      d -= static_cast<int>(*db * f.power);
    }
    return d;
  }

  RationalFunction derivative(std::size_t var) const {
    if (var >= nvars()) fail(ErrorCode::IndexOutOfRange, "derivative variable");
    if (is_polynomial()) return RationalFunction(num_.derivative(var));
    // Every base (including each q_j of the monomial part) goes up by one
    // power; the numerator becomes N' P - N sum_i e_i B_i' P / B_i.
    std::vector<Poly> bases;
    std::vector<unsigned> powers;
    for (std::size_t j = 0; j < nvars(); ++j) {
      if (mono_[j] == 0) continue;
      bases.push_back(Poly::variable(nvars(), j));
      powers.push_back(mono_[j]);
    }
    std::size_t nmono = bases.size();
    for (const auto& f : factors_) {
      bases.push_back(f.base);
      powers.push_back(f.power);
    }
    std::size_t m = bases.size();
    // prefix/suffix products give P / B_i without division
    std::vector<Poly> prefix(m + 1, Poly::constant(nvars(), C(1)));
    std::vector<Poly> suffix(m + 1, Poly::constant(nvars(), C(1)));
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * bases[i];
    for (std::size_t i = m; i-- > 0;) suffix[i] = suffix[i + 1] * bases[i];
    Poly result = num_.derivative(var) * prefix[m];
    for (std::size_t i = 0; i < m; ++i) {
      Poly db = bases[i].derivative(var);
      if (db.is_zero()) continue;
      result = result - num_ * db * (prefix[i] * suffix[i + 1]) * C(static_cast<int>(powers[i]));
    }
    RationalFunction out(nvars());
    out.num_ = std::move(result);
    out.mono_ = mono_;
    for (std::size_t j = 0; j < nvars(); ++j)
      if (mono_[j]) ++out.mono_[j];
    for (std::size_t i = nmono; i < m; ++i) out.factors_.push_back({bases[i], powers[i] + 1});
    out.normalize();
    return out;
  }

  RationalFunction partial(const MultiIndex& alpha) const {
    RationalFunction out = *this;
    for (std::size_t i = 0; i < nvars(); ++i)
      for (unsigned j = 0; j < alpha[i]; ++j) out = out.derivative(i);
    return out;
  }

  /// Value at a point; PoleAtPoint when the denominator vanishes (exactly,
  /// or within tol for float values).
  template <class T>
  T evaluate(const std::vector<T>& point, double tol = default_tolerance) const {
    T den = Poly::monomial(mono_, C(1)).evaluate(point);
    for (const auto& f : factors_) {
      T b = f.base.evaluate(point);
      for (unsigned e = 0; e < f.power; ++e) den = den * b;
    }
    if (vanishes(den, tol)) fail(ErrorCode::PoleAtPoint, "denominator vanishes at evaluation point");
    return num_.evaluate(point) / den;
  }

  RationalFunction operator-() const {
    RationalFunction out = *this;
    out.num_ = -out.num_;
    return out;
  }

  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    RationalFunction out(a.nvars());
    out.num_ = a.num_ * b.num_;
    out.mono_ = a.mono_ + b.mono_;
    out.factors_ = a.factors_;
    for (const auto& f : b.factors_) out.append_base(f.base, f.power);
    out.normalize();
    return out;
  }
  friend RationalFunction operator*(const RationalFunction& a, const C& s) {
    RationalFunction out = a;
    out.num_ = out.num_ * s;
    out.normalize();
    return out;
  }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    // Common denominator: componentwise max of the monomial part and of each
    // base's power.
    RationalFunction out(a.nvars());
    for (std::size_t j = 0; j < a.nvars(); ++j) out.mono_[j] = std::max(a.mono_[j], b.mono_[j]);
    out.factors_ = a.factors_;
    for (const auto& f : b.factors_) {
      bool found = false;
      for (auto& g : out.factors_)
        if (g.base == f.base) {
          g.power = std::max(g.power, f.power);
          found = true;
        }
      if (!found) out.factors_.push_back(f);
    }
    out.num_ = a.num_ * a.cofactor_to(out) + b.num_ * b.cofactor_to(out);
    out.normalize();
    return out;
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

  /// Equality by cross-multiplication.
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ * b.denominator() == b.num_ * a.denominator();
  }

  std::string to_string() const {
    if (is_polynomial()) return num_.to_string();
    std::string s = "(" + num_.to_string() + ")/(";
    bool first = true;
    for (std::size_t j = 0; j < nvars(); ++j) {
      if (mono_[j] == 0) continue;
      s += (first ? "" : "*") + std::string("q") + std::to_string(j + 1);
      if (mono_[j] > 1) s += "^" + std::to_string(mono_[j]);
      first = false;
    }
    for (const auto& f : factors_) {
      s += (first ? "(" : "*(") + f.base.to_string() + ")";
      if (f.power > 1) s += "^" + std::to_string(f.power);
      first = false;
    }
    return s + ")";
  }

 private:
  template <class T>
  static bool vanishes(const T& v, double tol) {
    if constexpr (std::is_same_v<T, Scalar>) return v.approx_zero(tol);
    else return std::abs(v) <= tol;
  }

  // Multiplier taking this denominator to the (larger) denominator of `target`.
  Poly cofactor_to(const RationalFunction& target) const {
    Poly c = Poly::monomial(target.mono_ - mono_, C(1));
    for (const auto& g : target.factors_) {
      unsigned have = 0;
      for (const auto& f : factors_)
        if (f.base == g.base) have = f.power;
      c = c * g.base.pow(g.power - have);
    }
    return c;
  }

  // Adds base^power to the factor list after splitting off monomial content
  // and making it monic.
  void append_base(Poly base, unsigned power) {
    if (power == 0) return;
    MultiIndex content = base.monomial_content();
    if (content.order() > 0) {
      for (std::size_t j = 0; j < mono_.size(); ++j) mono_[j] += content[j] * power;
      base = base.divide_monomial(content);
    }
    C lead = base.leading_coefficient();
    if (!(lead == C(1))) {
      C inv = C(1) / lead;
      base = base * inv;
      C scale(1);
      for (unsigned e = 0; e < power; ++e) scale = scale * inv;
      num_ = num_ * scale;
    }
    if (base.is_constant()) return;
    for (auto& f : factors_)
      if (f.base == base) {
        f.power += power;
        return;
      }
    factors_.push_back({std::move(base), power});
  }

  void normalize() {
    if (num_.is_zero()) {
      mono_ = MultiIndex(num_.nvars());
      factors_.clear();
      return;
    }
    // Re-run splitting for bases that arrived unnormalized.
    std::vector<Factor> pending;
    pending.swap(factors_);
    for (auto& f : pending) append_base(std::move(f.base), f.power);
    MultiIndex g = num_.monomial_content();
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = std::min(g[j], mono_[j]);
    if (g.order() > 0) {
      num_ = num_.divide_monomial(g);
      mono_ = mono_ - g;
    }
  }

  Poly num_;
  MultiIndex mono_;
  std::vector<Factor> factors_;
};

}  // namespace vega
