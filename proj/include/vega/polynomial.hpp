#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "vega/multi_index.hpp"
#include "vega/scalar.hpp"

namespace vega {

/// Converts a stored coefficient to the arithmetic type used for evaluation.
template <class T, class C>
T coefficient_as(const C& c) {
  if constexpr (std::is_same_v<T, C>) {
    return c;
  } else if constexpr (std::is_same_v<C, Scalar> && std::is_same_v<T, std::complex<double>>) {
    return c.to_complex();
  } else {
    return static_cast<T>(c);
  }
}

inline bool is_zero(const std::complex<double>& z) { return z == std::complex<double>(0.0, 0.0); }

/// Sparse multivariate polynomial over a coefficient ring C, terms kept in
/// graded-lex order with zero coefficients pruned.
template <class C>
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, C, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : n_(nvars) {}

  static Polynomial constant(std::size_t nvars, const C& c) {
    Polynomial p(nvars);
    p.add_term(MultiIndex(nvars), c);
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t i) {
    Polynomial p(nvars);
    p.add_term(MultiIndex::unit(nvars, i), C(1));
    return p;
  }
  static Polynomial monomial(const MultiIndex& m, const C& c) {
    Polynomial p(m.size());
    p.add_term(m, c);
    return p;
  }

  std::size_t nvars() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.order() == 0);
  }

  void add_term(const MultiIndex& m, const C& c) {
    if (m.size() != n_) fail(ErrorCode::InvalidArgument, "monomial arity does not match polynomial");
    if (vega::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (vega::is_zero(it->second)) terms_.erase(it);
    }
  }

  C coefficient(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? C(0) : it->second;
  }

  /// Total degree of the highest term; -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.rbegin()->first.order()); }

  /// The common degree when every term has the same order.
  std::optional<unsigned> homogeneous_degree() const {
    if (terms_.empty()) return std::nullopt;
    unsigned d = terms_.begin()->first.order();
    for (const auto& [m, c] : terms_)
      if (m.order() != d) return std::nullopt;
    return d;
  }

  /// Coefficient of the graded-lex greatest monomial.
  const C& leading_coefficient() const {
    if (terms_.empty()) fail(ErrorCode::InvalidArgument, "leading coefficient of zero polynomial");
    return terms_.rbegin()->second;
  }

  /// Component-wise minimum of the exponents (the monomial content).
  MultiIndex monomial_content() const {
    MultiIndex g(n_);
    if (terms_.empty()) return g;
    g = terms_.begin()->first;
    for (const auto& [m, c] : terms_)
      for (std::size_t i = 0; i < n_; ++i) g[i] = std::min(g[i], m[i]);
    return g;
  }

  Polynomial divide_monomial(const MultiIndex& d) const {
    Polynomial out(n_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m - d, c);
    return out;
  }

  Polynomial derivative(std::size_t var) const {
    Polynomial out(n_);
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      MultiIndex dm = m;
      --dm[var];
      out.add_term(dm, c * C(static_cast<int>(m[var])));
    }
    return out;
  }

  Polynomial partial(const MultiIndex& alpha) const {
    Polynomial out = *this;
    for (std::size_t i = 0; i < n_; ++i)
      for (unsigned j = 0; j < alpha[i]; ++j) out = out.derivative(i);
    return out;
  }

  template <class T>
  T evaluate(const std::vector<T>& point) const {
    if (point.size() != n_) fail(ErrorCode::InvalidArgument, "evaluation point has wrong dimension");
    std::vector<std::vector<T>> powers(n_);
    for (std::size_t i = 0; i < n_; ++i) powers[i].push_back(T(1));
    auto power = [&](std::size_t i, unsigned e) -> const T& {
      while (powers[i].size() <= e) powers[i].push_back(powers[i].back() * point[i]);
      return powers[i][e];
    };
    T acc = T(0);
    for (const auto& [m, c] : terms_) {
      T term = coefficient_as<T>(c);
      for (std::size_t i = 0; i < n_; ++i)
        if (m[i]) term = term * power(i, m[i]);
      acc = acc + term;
    }
    return acc;
  }

  Polynomial pow(unsigned e) const {
    Polynomial result = constant(n_, C(1));
    Polynomial base = *this;
    while (e) {
      if (e & 1u) result = result * base;
      e >>= 1u;
      if (e) base = base * base;
    }
    return result;
  }

  template <class F>
  auto map_coefficients(F&& f) const {
    using D = std::decay_t<decltype(f(std::declval<const C&>()))>;
    Polynomial<D> out(n_);
    for (const auto& [m, c] : terms_) out.add_term(m, f(c));
    return out;
  }

  Polynomial operator-() const {
    Polynomial out(n_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial out = a;
    out.n_ = std::max(a.n_, b.n_);
    for (const auto& [m, c] : b.terms_) out.add_term(m, c);
    return out;
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(std::max(a.n_, b.n_));
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma + mb, ca * cb);
    return out;
  }
  friend Polynomial operator*(const Polynomial& a, const C& s) {
    Polynomial out(a.n_);
    if (vega::is_zero(s)) return out;
    for (const auto& [m, c] : a.terms_) out.add_term(m, c * s);
    return out;
  }
  friend Polynomial operator*(const C& s, const Polynomial& a) { return a * s; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) s += " + ";
      first = false;
      s += "(" + coefficient_string(it->second) + ")";
      for (std::size_t i = 0; i < n_; ++i) {
        if (it->first[i] == 0) continue;
        s += "*q" + std::to_string(i + 1);
        if (it->first[i] > 1) s += "^" + std::to_string(it->first[i]);
      }
    }
    return s;
  }

 private:
  static std::string coefficient_string(const C& c) {
    if constexpr (std::is_same_v<C, Scalar>) return c.to_string();
    else return std::to_string(c);
  }

  std::size_t n_ = 0;
  Terms terms_;
};

}  // namespace vega
