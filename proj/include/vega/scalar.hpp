#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "vega/errors.hpp"

namespace vega {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Default comparison tolerance for float-mode values.
inline constexpr double default_tolerance = 1e-12;

namespace detail {

inline std::optional<BigInt> exact_isqrt(const BigInt& v) {
  if (v < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(v);
  if (r * r == v) return r;
  return std::nullopt;
}

// Integer k-th root of v >= 0 when it is exact.
inline std::optional<BigInt> exact_iroot(const BigInt& v, unsigned k) {
  if (v < 0 || k == 0) return std::nullopt;
  if (k == 1 || v < 2) return v;
  // Bisection on [0, 2^(bits/k + 1)].
  unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
  BigInt lo = 0;
  BigInt hi = BigInt(1) << (bits / k + 1);
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (boost::multiprecision::pow(mid, k) <= v) lo = mid;
    else hi = mid - 1;
  }
  if (boost::multiprecision::pow(lo, k) == v) return lo;
  return std::nullopt;
}

inline std::optional<Rational> rational_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  auto n = exact_isqrt(boost::multiprecision::numerator(q));
  auto d = exact_isqrt(boost::multiprecision::denominator(q));
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

inline std::string rational_to_string(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

// Accepts "p", "p/q", and finite decimals such as "-0.25" or "1.5e-3" (exactly).
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { fail(ErrorCode::ParseError, "not a rational number: '" + s + "'"); };
  if (s.empty()) bad();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) fail(ErrorCode::ParseError, "zero denominator in '" + s + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
  BigInt mantissa = 0;
  long long scale = 0;
  bool any_digit = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      any_digit = true;
      if (after_point) --scale;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) bad();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') bad();
    ++pos;
    std::string rest = s.substr(pos);
    if (rest.empty()) bad();
    std::size_t used = 0;
    long long ex = 0;
    try {
      ex = std::stoll(rest, &used);
    } catch (...) {
      bad();
    }
    if (used != rest.size()) bad();
    scale += ex;
  }
  Rational value(mantissa);
  if (scale > 0) value *= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale)));
  if (scale < 0) value /= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-scale)));
  return neg ? Rational(-value) : value;
}

inline std::string double_to_string(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace detail

/// A coefficient in one of two arithmetic modes: exact Gaussian rational
/// (re + i*im with re, im in Q) or complex double. Exact op exact stays exact;
/// an operation with a float operand yields a float.
class Scalar {
 public:
  struct Exact {
    Rational re;
    Rational im;
  };

  Scalar() : v_(Exact{}) {}
  Scalar(int v) : v_(Exact{Rational(v), Rational(0)}) {}
  Scalar(long v) : v_(Exact{Rational(v), Rational(0)}) {}
  Scalar(long long v) : v_(Exact{Rational(v), Rational(0)}) {}
  Scalar(const BigInt& v) : v_(Exact{Rational(v), Rational(0)}) {}
  Scalar(const Rational& re) : v_(Exact{re, Rational(0)}) {}
  Scalar(const Rational& re, const Rational& im) : v_(Exact{re, im}) {}

  static Scalar from_complex(std::complex<double> z) {
    Scalar s;
    s.v_ = z;
    return s;
  }
  static Scalar from_double(double x) { return from_complex({x, 0.0}); }
  static Scalar i() { return Scalar(Rational(0), Rational(1)); }
  static Scalar parse(std::string_view text) { return Scalar(detail::parse_rational(text)); }

  bool is_exact() const { return std::holds_alternative<Exact>(v_); }
  bool is_float() const { return !is_exact(); }

  const Rational& re() const { return exact().re; }
  const Rational& im() const { return exact().im; }

  std::complex<double> to_complex() const {
    if (auto e = std::get_if<Exact>(&v_))
      return {e->re.convert_to<double>(), e->im.convert_to<double>()};
    return std::get<std::complex<double>>(v_);
  }

  Scalar to_float() const { return from_complex(to_complex()); }

  /// Exactly zero (float values only when they are 0.0 + 0.0i).
  bool is_zero() const {
    if (auto e = std::get_if<Exact>(&v_)) return e->re == 0 && e->im == 0;
    return std::get<std::complex<double>>(v_) == std::complex<double>(0.0, 0.0);
  }

  /// Zero test honoring the float tolerance; exact values are tested exactly.
  bool approx_zero(double tol) const {
    if (is_exact()) return is_zero();
    return std::abs(to_complex()) <= tol;
  }

  bool is_one() const { return is_exact() && re() == 1 && im() == 0; }

  /// Exact real rational (imaginary part exactly zero).
  bool is_rational() const { return is_exact() && im() == 0; }

  double abs() const { return std::abs(to_complex()); }

  Scalar conj() const {
    if (auto e = std::get_if<Exact>(&v_)) return Scalar(e->re, -e->im);
    return from_complex(std::conj(std::get<std::complex<double>>(v_)));
  }

  Scalar operator-() const {
    if (auto e = std::get_if<Exact>(&v_)) return Scalar(-e->re, -e->im);
    return from_complex(-std::get<std::complex<double>>(v_));
  }

  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(a.re() + b.re(), a.im() + b.im());
    return from_complex(a.to_complex() + b.to_complex());
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(a.re() - b.re(), a.im() - b.im());
    return from_complex(a.to_complex() - b.to_complex());
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) {
      const Exact& x = a.exact();
      const Exact& y = b.exact();
      if (x.im == 0 && y.im == 0) return Scalar(Rational(x.re * y.re));
      return Scalar(x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re);
    }
    return from_complex(a.to_complex() * b.to_complex());
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) fail(ErrorCode::DivisionByZero, "scalar division by zero");
    if (a.is_exact() && b.is_exact()) {
      const Exact& x = a.exact();
      const Exact& y = b.exact();
      if (y.im == 0) return Scalar(Rational(x.re / y.re), Rational(x.im / y.re));
      Rational den = y.re * y.re + y.im * y.im;
      return Scalar((x.re * y.re + x.im * y.im) / den, (x.im * y.re - x.re * y.im) / den);
    }
    return from_complex(a.to_complex() / b.to_complex());
  }

  /// Structural equality: both exact and equal, or both float and bitwise equal.
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.is_exact() != b.is_exact()) return false;
    if (a.is_exact()) return a.re() == b.re() && a.im() == b.im();
    return a.to_complex() == b.to_complex();
  }

  Scalar pow(long long e) const {
    if (e < 0) return Scalar(1) / pow(-e);
    Scalar result(1);
    if (is_float()) result = from_double(1.0);
    Scalar base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      base *= base;
      e >>= 1;
    }
    return result;
  }

  /// Principal square root when it is again an exact Gaussian rational.
  std::optional<Scalar> sqrt_exact() const {
    if (!is_exact()) return std::nullopt;
    const Rational& x = re();
    const Rational& y = im();
    if (y == 0) {
      if (x >= 0) {
        if (auto r = detail::rational_sqrt(x)) return Scalar(*r);
        return std::nullopt;
      }
      if (auto r = detail::rational_sqrt(Rational(-x))) return Scalar(Rational(0), *r);
      return std::nullopt;
    }
    auto modulus = detail::rational_sqrt(Rational(x * x + y * y));
    if (!modulus) return std::nullopt;
    auto a = detail::rational_sqrt(Rational((x + *modulus) / 2));
    if (!a || *a == 0) return std::nullopt;
    Rational b = y / (2 * *a);
    return Scalar(*a, b);
  }

  /// Principal square root: exact when possible, float otherwise.
  Scalar sqrt() const {
    if (auto s = sqrt_exact()) return *s;
    return from_complex(std::sqrt(to_complex()));
  }

  std::string to_string() const {
    if (is_exact()) {
      const Exact& e = exact();
      if (e.im == 0) return detail::rational_to_string(e.re);
      std::string im_part = detail::rational_to_string(e.im) + "i";
      if (e.re == 0) return im_part;
      return detail::rational_to_string(e.re) + (e.im > 0 ? "+" : "") + im_part;
    }
    auto z = to_complex();
    if (z.imag() == 0.0) return detail::double_to_string(z.real());
    return detail::double_to_string(z.real()) + (z.imag() >= 0 ? "+" : "") +
           detail::double_to_string(z.imag()) + "i";
  }

  friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.to_string(); }

 private:
  const Exact& exact() const {
    if (auto e = std::get_if<Exact>(&v_)) return *e;
    fail(ErrorCode::InvalidArgument, "exact component requested from a float scalar");
  }

  std::variant<Exact, std::complex<double>> v_;
};

inline bool is_zero(const Scalar& s) { return s.is_zero(); }

/// |a - b| <= tol * max(1, |a|, |b|); exact pairs compare exactly.
inline bool approx_equal(const Scalar& a, const Scalar& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a == b;
  double scale = std::max({1.0, a.abs(), b.abs()});
  return std::abs(a.to_complex() - b.to_complex()) <= tol * scale;
}

/// Deterministic total order used for canonical keys: exact before float,
/// then by real part, then by imaginary part.
inline bool canonical_less(const Scalar& a, const Scalar& b) {
  if (a.is_exact() != b.is_exact()) return a.is_exact();
  if (a.is_exact()) {
    if (a.re() != b.re()) return a.re() < b.re();
    return a.im() < b.im();
  }
  auto x = a.to_complex();
  auto y = b.to_complex();
  if (x.real() != y.real()) return x.real() < y.real();
  return x.imag() < y.imag();
}

struct ScalarLess {
  bool operator()(const Scalar& a, const Scalar& b) const { return canonical_less(a, b); }
};

/// Exact k-th root of a positive rational when it exists.
inline std::optional<Rational> rational_root(const Rational& q, unsigned k) {
  if (q <= 0) return std::nullopt;
  auto n = detail::exact_iroot(boost::multiprecision::numerator(q), k);
  auto d = detail::exact_iroot(boost::multiprecision::denominator(q), k);
  if (!n || !d) return std::nullopt;
  return Rational(*n, *d);
}

}  // namespace vega
