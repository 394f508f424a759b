#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <optional>
#include <vector>

#include "vega/scalar.hpp"

namespace vega {

using Vector = std::vector<Scalar>;

/// Dense row-major matrix of Scalars.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : r_(r), c_(c), a_(r * c, Scalar(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
  }
  static Matrix from_rows(const std::vector<std::vector<Scalar>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < m.r_; ++i) {
      if (rows[i].size() != m.c_) fail(ErrorCode::InvalidArgument, "ragged matrix rows");
      for (std::size_t j = 0; j < m.c_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }
  static Matrix from_columns(const std::vector<Vector>& cols) {
    Matrix m(cols.empty() ? 0 : cols[0].size(), cols.size());
    for (std::size_t j = 0; j < m.c_; ++j)
      for (std::size_t i = 0; i < m.r_; ++i) m(i, j) = cols[j][i];
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  Scalar& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  Vector column(std::size_t j) const {
    Vector v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_column(std::size_t j, const Vector& v) {
    for (std::size_t i = 0; i < r_; ++i) (*this)(i, j) = v[i];
  }

  bool is_exact() const {
    return std::all_of(a_.begin(), a_.end(), [](const Scalar& s) { return s.is_exact(); });
  }
  Matrix to_float() const {
    Matrix m = *this;
    for (auto& x : m.a_) x = x.to_float();
    return m;
  }
  bool is_identity() const {
    if (r_ != c_) return false;
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j)
        if (!((*this)(i, j) == Scalar(i == j ? 1 : 0))) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Scalar trace() const {
    Scalar t(0);
    for (std::size_t i = 0; i < std::min(r_, c_); ++i) t += (*this)(i, i);
    return t;
  }

  Vector apply(const Vector& v) const {
    Vector out(r_, Scalar(0));
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j)
        if (!(*this)(i, j).is_zero() && !v[j].is_zero()) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) fail(ErrorCode::InvalidArgument, "matrix product shape mismatch");
    Matrix m(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.c_; ++j)
          if (!b(k, j).is_zero()) m(i, j) += a(i, k) * b(k, j);
      }
    return m;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.a_.size(); ++i) a.a_[i] += b.a_[i];
    return a;
  }
  friend Matrix operator-(Matrix a, const Matrix& b) {
    for (std::size_t i = 0; i < a.a_.size(); ++i) a.a_[i] -= b.a_[i];
    return a;
  }
  friend Matrix operator*(Matrix a, const Scalar& s) {
    for (auto& x : a.a_) x *= s;
    return a;
  }
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<Scalar> a_;
};

struct RrefResult {
  Matrix reduced;
  std::vector<std::size_t> pivots;
};

/// Reduced row echelon form. Exact input uses exact pivots; anything else
/// uses partial pivoting and treats entries below tol*scale as zero.
inline RrefResult rref(Matrix m, double tol = default_tolerance) {
  bool exact = m.is_exact();
  double scale = 1.0;
  if (!exact)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) scale = std::max(scale, m(i, j).abs());
  auto negligible = [&](const Scalar& s) { return exact ? s.is_zero() : s.abs() <= tol * scale; };
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t best = row;
    bool found = false;
    for (std::size_t i = row; i < m.rows(); ++i) {
      if (negligible(m(i, col))) continue;
      if (!found || (!exact && m(i, col).abs() > m(best, col).abs())) best = i;
      found = true;
      if (exact) break;
    }
    if (!found) {
      for (std::size_t i = row; i < m.rows(); ++i) m(i, col) = exact ? Scalar(0) : Scalar::from_double(0.0);
      continue;
    }
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(best, j));
    Scalar inv = Scalar(1) / m(row, col);
    for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Scalar f = m(i, col);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m, double tol = default_tolerance) { return rref(m, tol).pivots.size(); }

/// Kernel basis; vector j has a 1 in the j-th free coordinate.
inline std::vector<Vector> nullspace(const Matrix& m, double tol = default_tolerance) {
  auto [r, pivots] = rref(m, tol);
  bool exact = r.is_exact();
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<Vector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vector v(m.cols(), exact ? Scalar(0) : Scalar::from_double(0.0));
    v[f] = Scalar(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline Matrix inverse(const Matrix& m, double tol = default_tolerance) {
  if (m.rows() != m.cols()) fail(ErrorCode::InvalidArgument, "inverse of a non-square matrix");
  std::size_t n = m.rows();
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = Scalar(1);
  }
  auto [r, pivots] = rref(aug, tol);
  if (pivots.size() < n || pivots[n - 1] != n - 1) fail(ErrorCode::DivisionByZero, "singular matrix");
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
  return inv;
}

// ---------------------------------------------------------------------------
// Univariate polynomials, coefficients low to high.

using UPoly = std::vector<Scalar>;

inline UPoly upoly_trim(UPoly p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
  return p;
}

inline Scalar upoly_eval(const UPoly& p, const Scalar& x) {
  Scalar acc(0);
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

inline UPoly upoly_derivative(const UPoly& p) {
  UPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Scalar(static_cast<long long>(i)));
  return upoly_trim(d);
}

inline std::pair<UPoly, UPoly> upoly_divmod(UPoly a, const UPoly& b) {
  UPoly bt = upoly_trim(b);
  if (bt.empty()) fail(ErrorCode::DivisionByZero, "polynomial division by zero");
  a = upoly_trim(a);
  if (a.size() < bt.size()) return {UPoly{}, a};
  UPoly q(a.size() - bt.size() + 1, Scalar(0));
  for (std::size_t k = q.size(); k-- > 0;) {
    Scalar c = a[k + bt.size() - 1] / bt.back();
    q[k] = c;
    for (std::size_t j = 0; j < bt.size(); ++j) a[k + j] -= c * bt[j];
  }
  a.resize(bt.size() - 1);
  return {upoly_trim(q), upoly_trim(a)};
}

inline UPoly upoly_monic(UPoly p) {
  p = upoly_trim(p);
  if (p.empty()) return p;
  Scalar lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

inline UPoly upoly_gcd(UPoly a, UPoly b) {
  a = upoly_trim(a);
  b = upoly_trim(b);
  while (!b.empty()) {
    auto r = upoly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return upoly_monic(a);
}

/// Yun's square-free factorization of an exact polynomial: factors[i] is the
/// product of the roots of multiplicity i + 1.
inline std::vector<UPoly> squarefree_factors(const UPoly& p) {
  std::vector<UPoly> out;
  UPoly f = upoly_monic(p);
  UPoly fp = upoly_derivative(f);
  UPoly a = upoly_gcd(f, fp);
  UPoly b = upoly_divmod(f, a).first;
  UPoly c = upoly_divmod(fp, a).first;
  UPoly d = upoly_trim([&] {
    UPoly db = upoly_derivative(b);
    UPoly r(std::max(c.size(), db.size()), Scalar(0));
    for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
    for (std::size_t i = 0; i < db.size(); ++i) r[i] -= db[i];
    return r;
  }());
  while (b.size() > 1) {
    UPoly g = upoly_gcd(b, d);
    out.push_back(g);
    b = upoly_divmod(b, g).first;
    c = upoly_divmod(d, g).first;
    UPoly db = upoly_derivative(b);
    UPoly r(std::max(c.size(), db.size()), Scalar(0));
    for (std::size_t i = 0; i < c.size(); ++i) r[i] += c[i];
    for (std::size_t i = 0; i < db.size(); ++i) r[i] -= db[i];
    d = upoly_trim(r);
  }
  return out;
}

/// Characteristic polynomial det(xI - A) by Faddeev-LeVerrier (monic).
inline UPoly charpoly(const Matrix& a) {
  std::size_t n = a.rows();
  UPoly c(n + 1, Scalar(0));
  c[n] = Scalar(1);
  Matrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m + Matrix::identity(n) * c[n - k + 1];
    c[n - k] = -(a * m).trace() / Scalar(static_cast<long long>(k));
  }
  return c;
}

/// Numerical roots through the companion matrix, Newton-polished.
inline std::vector<std::complex<double>> numeric_roots(const UPoly& p) {
  UPoly m = upoly_monic(p);
  std::size_t n = m.size() - 1;
  if (n == 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < n; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1)) = -m[i].to_complex();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<std::complex<double>> roots;
  std::vector<std::complex<double>> coef;
  for (const auto& s : m) coef.push_back(s.to_complex());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    std::complex<double> z = es.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      std::complex<double> f = 0.0, df = 0.0;
      for (std::size_t k = coef.size(); k-- > 0;) {
        df = df * z + f;
        f = f * z + coef[k];
      }
      if (std::abs(df) < 1e-300) break;
      std::complex<double> step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
    roots.push_back(z);
  }
  return roots;
}

namespace detail {

// Continued-fraction convergents of x with denominators up to max_den.
inline std::vector<Rational> convergents(double x, long long max_den = 1000000000LL) {
  std::vector<Rational> out;
  if (!std::isfinite(x)) return out;
  BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    BigInt ai = static_cast<long long>(a);
    BigInt h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    out.emplace_back(h2, k2);
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    double frac = r - a;
    if (std::abs(frac) < 1e-15) break;
    r = 1.0 / frac;
  }
  return out;
}

inline std::vector<unsigned long long> divisors(unsigned long long v) {
  std::vector<unsigned long long> d;
  for (unsigned long long i = 1; i * i <= v; ++i)
    if (v % i == 0) {
      d.push_back(i);
      if (i * i != v) d.push_back(v / i);
    }
  return d;
}

// Integer coefficients of a real-rational polynomial (denominators cleared).
inline std::vector<BigInt> integer_coefficients(const std::vector<Rational>& p) {
  BigInt l = 1;
  for (const auto& c : p) {
    BigInt d = boost::multiprecision::denominator(c);
    l = l / boost::multiprecision::gcd(l, d) * d;
  }
  std::vector<BigInt> out;
  for (const auto& c : p) out.push_back(boost::multiprecision::numerator(c) * (l / boost::multiprecision::denominator(c)));
  return out;
}

}  // namespace detail

/// All rational roots of an exact polynomial with Gaussian-rational
/// coefficients, by the rational root theorem applied to its real or
/// imaginary part. nullopt when the coefficients are too large to search.
inline std::optional<std::vector<Rational>> rational_roots(const UPoly& p_in) {
  UPoly p = upoly_trim(p_in);
  std::vector<Rational> re, im;
  for (const auto& c : p) {
    re.push_back(c.re());
    im.push_back(c.im());
  }
  bool re_zero = std::all_of(re.begin(), re.end(), [](const Rational& x) { return x == 0; });
  std::vector<Rational> real_part = re_zero ? im : re;
  while (!real_part.empty() && real_part.back() == 0) real_part.pop_back();
  std::vector<Rational> roots;
  if (real_part.size() <= 1) return roots;
  std::size_t shift = 0;
  while (real_part[shift] == 0) ++shift;
  if (shift > 0 && upoly_eval(p, Scalar(0)).is_zero()) roots.push_back(Rational(0));
  std::vector<Rational> trimmed(real_part.begin() + static_cast<long>(shift), real_part.end());
  if (trimmed.size() <= 1) return roots;
  auto ints = detail::integer_coefficients(trimmed);
  BigInt lead = boost::multiprecision::abs(ints.back());
  BigInt konst = boost::multiprecision::abs(ints.front());
  const BigInt limit = BigInt(1000000000000LL);
  if (lead > limit || konst > limit) return std::nullopt;
  auto dq = detail::divisors(lead.convert_to<unsigned long long>());
  auto dp = detail::divisors(konst.convert_to<unsigned long long>());
  for (auto q : dq)
    for (auto pp : dp)
      for (int sign : {1, -1}) {
        Rational r(BigInt(pp) * sign, BigInt(q));
        if (boost::multiprecision::denominator(r) != q) continue;  // reduced duplicate
        if (std::find(roots.begin(), roots.end(), r) != roots.end()) continue;
        if (upoly_eval(p, Scalar(r)).is_zero()) roots.push_back(r);
      }
  std::sort(roots.begin(), roots.end());
  return roots;
}

struct Root {
  Scalar value;
  unsigned multiplicity = 1;
  /// Certified not to be a real rational number (always decided for exact roots).
  bool certified_not_rational = false;
};

/// Roots of a polynomial with multiplicities. Exact coefficients: roots in
/// Q(i) are found exactly (numerical guess, rationalized, verified exactly,
/// plus a rational-root-theorem sweep); quadratic remainders use the exact
/// quadratic formula when the discriminant is a square in Q(i); any other
/// root is returned as a float.
inline std::vector<Root> polynomial_roots(const UPoly& p_in) {
  UPoly p = upoly_trim(p_in);
  std::vector<Root> out;
  if (p.size() <= 1) return out;
  bool exact = std::all_of(p.begin(), p.end(), [](const Scalar& s) { return s.is_exact(); });
  if (!exact) {
    for (auto z : numeric_roots(p)) out.push_back({Scalar::from_complex(z), 1, false});
    return out;
  }
  auto factors = squarefree_factors(p);
  for (std::size_t mult = 0; mult < factors.size(); ++mult) {
    UPoly f = factors[mult];
    auto emit = [&](const Scalar& v, bool certified) {
      out.push_back({v, static_cast<unsigned>(mult + 1), certified});
    };
    auto deflate = [&](const Scalar& r) { f = upoly_divmod(f, UPoly{-r, Scalar(1)}).first; };
    // numeric guesses, rationalized and verified
    for (auto z : (f.size() > 2 ? numeric_roots(f) : std::vector<std::complex<double>>{})) {
      if (f.size() <= 3) break;
      auto re_c = detail::convergents(z.real());
      auto im_c = std::abs(z.imag()) < 1e-9 ? std::vector<Rational>{Rational(0)} : detail::convergents(z.imag());
      bool done = false;
      for (const auto& a : re_c) {
        if (std::abs(a.convert_to<double>() - z.real()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
        for (const auto& b : im_c) {
          if (std::abs(b.convert_to<double>() - z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
          Scalar cand(a, b);
          if (upoly_eval(f, cand).is_zero()) {
            emit(cand, true);
            deflate(cand);
            done = true;
            break;
          }
        }
        if (done) break;
      }
    }
    // rational-root sweep for anything missed
    bool certified = false;
    if (f.size() > 3) {
      if (auto rr = rational_roots(f)) {
        for (const auto& r : *rr) {
          emit(Scalar(r), true);
          deflate(Scalar(r));
        }
        certified = true;
      }
    }
    if (f.size() == 2) {
      emit(-f[0] / f[1], true);
    } else if (f.size() == 3) {
      Scalar a = f[2], b = f[1], c = f[0];
      Scalar disc = b * b - Scalar(4) * a * c;
      if (auto s = disc.sqrt_exact()) {
        emit((-b + *s) / (Scalar(2) * a), true);
        emit((-b - *s) / (Scalar(2) * a), true);
      } else {
        auto sq = std::sqrt(disc.to_complex());
        auto aa = a.to_complex(), bb = b.to_complex();
        emit(Scalar::from_complex((-bb + sq) / (2.0 * aa)), true);
        emit(Scalar::from_complex((-bb - sq) / (2.0 * aa)), true);
      }
    } else if (f.size() > 3) {
      for (auto z : numeric_roots(f)) emit(Scalar::from_complex(z), certified);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Root& x, const Root& y) { return canonical_less(x.value, y.value); });
  return out;
}

/// Jordan chains of A for an exact eigenvalue lambda. Each chain is returned
/// bottom-up: chain[0] is an eigenvector and (A - lambda) chain[j] = chain[j-1].
inline std::vector<std::vector<Vector>> jordan_chains(const Matrix& a, const Scalar& lambda, unsigned algebraic_multiplicity) {
  std::size_t n = a.rows();
  Matrix nmat = a - Matrix::identity(n) * lambda;
  // kernels of N^j until their dimension reaches the algebraic multiplicity
  std::vector<std::vector<Vector>> kernels{{}};
  Matrix power = Matrix::identity(n);
  while (kernels.back().size() < algebraic_multiplicity) {
    power = power * nmat;
    auto k = nullspace(power);
    if (k.size() == kernels.back().size()) fail(ErrorCode::NotDiagonalizable, "Jordan chain construction stalled");
    kernels.push_back(std::move(k));
  }
  std::size_t top = kernels.size() - 1;
  std::vector<std::vector<Vector>> chains;
  for (std::size_t level = top; level >= 1; --level) {
    // kernel_{level-1} plus the level-th vectors of longer chains, extended
    // to a basis of kernel_level by new chain heads
    std::vector<Vector> spanning = kernels[level - 1];
    for (const auto& chain : chains)
      if (chain.size() > level) spanning.push_back(chain[level - 1]);
    std::size_t r = spanning.empty() ? 0 : rank(Matrix::from_columns(spanning));
    for (const auto& cand : kernels[level]) {
      spanning.push_back(cand);
      std::size_t r2 = rank(Matrix::from_columns(spanning));
      if (r2 == r) {
        spanning.pop_back();
        continue;
      }
      r = r2;
      std::vector<Vector> chain{cand};
      for (std::size_t j = 1; j < level; ++j) chain.push_back(nmat.apply(chain.back()));
      std::reverse(chain.begin(), chain.end());
      chains.push_back(chain);
    }
  }
  return chains;
}

}  // namespace vega
