#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vega/linalg.hpp"
#include "vega/potential.hpp"

namespace vega {

/// Arithmetic nature of a frequency ω = √λ. Irrational means "certified not a
/// rational number" (this includes non-real ω).
enum class FrequencyTag { Zero, NonzeroRational, Irrational, Undetermined };

constexpr std::string_view to_string(FrequencyTag t) {
  switch (t) {
    case FrequencyTag::Zero: return "Zero";
    case FrequencyTag::NonzeroRational: return "NonzeroRational";
    case FrequencyTag::Irrational: return "Irrational";
    case FrequencyTag::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

enum class Independence { True, False, Asserted, Undetermined };

constexpr std::string_view to_string(Independence t) {
  switch (t) {
    case Independence::True: return "True";
    case Independence::False: return "False";
    case Independence::Asserted: return "Asserted";
    case Independence::Undetermined: return "Undetermined";
  }
  return "Unknown";
}

struct Frequency {
  Scalar lambda;
  Scalar omega;  // principal square root of lambda
  FrequencyTag tag = FrequencyTag::Undetermined;
  std::optional<Rational> rational;  // set for Zero and NonzeroRational
};

/// Tags ω = √λ. Exact λ is always decided; a float λ is decided only when the
/// caller certifies it is not a rational number.
inline Frequency frequency_from_lambda(const Scalar& lambda, bool certified_not_rational = false) {
  Frequency f;
  f.lambda = lambda;
  f.omega = lambda.sqrt();
  if (lambda.is_exact()) {
    if (lambda.is_zero()) {
      f.tag = FrequencyTag::Zero;
      f.rational = Rational(0);
    } else if (f.omega.is_exact() && f.omega.is_rational()) {
      f.tag = FrequencyTag::NonzeroRational;
      f.rational = f.omega.re();
    } else {
      f.tag = FrequencyTag::Irrational;
    }
  } else {
    f.tag = certified_not_rational ? FrequencyTag::Irrational : FrequencyTag::Undetermined;
  }
  return f;
}

/// A frequency given directly by its value (exact ω is tagged from ω itself).
inline Frequency frequency_from_omega(const Scalar& omega) {
  Frequency f = frequency_from_lambda(omega * omega);
  if (omega.is_exact()) f.omega = omega;
  if (f.tag == FrequencyTag::NonzeroRational) f.rational = omega.re();
  return f;
}

struct ResonanceClass {
  std::vector<FrequencyTag> tags;
  Independence z_linear_independent = Independence::Undetermined;
  /// Integer relation Σ c_i ω_i = 0 when dependence is certified.
  std::optional<std::vector<BigInt>> witness;
};

/// Exact ratio ω_i/ω_j when it is a rational number.
inline std::optional<Rational> rational_ratio(const Frequency& a, const Frequency& b) {
  if (!a.lambda.is_exact() || !b.lambda.is_exact() || a.lambda.is_zero() || b.lambda.is_zero()) return std::nullopt;
  Scalar sq = a.lambda / b.lambda;
  if (!sq.is_rational() || sq.re() <= 0) return std::nullopt;
  auto r = detail::rational_sqrt(sq.re());
  if (!r) return std::nullopt;
  // pick the sign realized by the principal roots
  std::complex<double> num = a.omega.to_complex() / b.omega.to_complex();
  return num.real() < 0 ? Rational(-*r) : *r;
}

inline ResonanceClass classify_resonance(const std::vector<Frequency>& omegas, bool asserted = false) {
  ResonanceClass rc;
  std::size_t n = omegas.size();
  for (const auto& f : omegas) rc.tags.push_back(f.tag);
  for (std::size_t i = 0; i < n; ++i)
    if (omegas[i].tag == FrequencyTag::Zero) {
      std::vector<BigInt> w(n, 0);
      w[i] = 1;
      rc.z_linear_independent = Independence::False;
      rc.witness = w;
      return rc;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (auto r = rational_ratio(omegas[i], omegas[j])) {
        // ω_i/ω_j = a/b  =>  b ω_i - a ω_j = 0
        std::vector<BigInt> w(n, 0);
        w[i] = boost::multiprecision::denominator(*r);
        w[j] = -boost::multiprecision::numerator(*r);
        rc.z_linear_independent = Independence::False;
        rc.witness = w;
        return rc;
      }
  bool all_decided_nonzero = n > 0;
  for (const auto& f : omegas)
    if (f.tag == FrequencyTag::Undetermined) all_decided_nonzero = false;
  if (n == 1 && all_decided_nonzero) rc.z_linear_independent = Independence::True;
  else if (asserted) rc.z_linear_independent = Independence::Asserted;
  return rc;
}

struct DarbouxData {
  int k = 0;
  Point d;
  Scalar gamma;
  bool normalized = false;
  Matrix hessian;
  /// One entry per eigenbasis column.
  std::vector<Scalar> eigenvalues;
  std::vector<Frequency> frequencies;
  /// Columns are (generalized) eigenvectors; P^{-1} H P = diag(λ) + J.
  Matrix eigenbasis;
  Matrix eigenbasis_inv;
  bool diagonalizable = true;
  /// jordan_coupling[i] marks J(i, i+1) = 1.
  std::vector<bool> jordan_coupling;
  /// Column of the eigenbasis equal to d (eigenvalue (k-1)γ).
  std::size_t darboux_index = 0;
  /// V* = potential_scale * V after normalization (1 unless V was rescaled).
  Scalar potential_scale = Scalar(1);
  bool potential_rescaled = false;

  std::size_t n() const { return d.size(); }
};

namespace detail {

inline bool parallel(const Vector& a, const Vector& b, double tol) {
  Matrix m = Matrix::from_columns({a, b});
  return rank(m, tol) <= 1;
}

inline std::size_t first_nonzero(const Vector& v, double tol) {
  double scale = 0.0;
  for (const auto& x : v) scale = std::max(scale, x.abs());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].is_exact() ? !v[i].is_zero() : v[i].abs() > tol * scale) return i;
  return v.size();
}

struct Block {
  Scalar lambda;
  bool certified = false;
  std::vector<Vector> chain;  // bottom-up
};

inline std::vector<Block> spectral_blocks(const Matrix& h, double tol) {
  std::size_t n = h.rows();
  std::vector<Block> blocks;
  if (h.is_exact()) {
    for (const auto& root : polynomial_roots(charpoly(h))) {
      if (root.value.is_exact()) {
        auto kernel = nullspace(h - Matrix::identity(n) * root.value);
        if (kernel.size() == root.multiplicity) {
          for (auto& v : kernel) blocks.push_back({root.value, true, {v}});
        } else {
          for (auto& c : jordan_chains(h, root.value, root.multiplicity)) blocks.push_back({root.value, true, c});
        }
      } else {
        Matrix hf = h.to_float();
        auto kernel = nullspace(hf - Matrix::identity(n) * root.value, 1e-8);
        if (kernel.size() != root.multiplicity)
          fail(ErrorCode::NotDiagonalizable, "defective eigenvalue without an exact representation");
        for (auto& v : kernel) blocks.push_back({root.value, root.certified_not_rational, {v}});
      }
    }
  } else {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h(i, j).to_complex();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(es.eigenvectors());
    lu.setThreshold(1e-8);
    if (lu.rank() < static_cast<Eigen::Index>(n)) fail(ErrorCode::NotDiagonalizable, "float Hessian is defective");
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(n); ++c) {
      Vector v;
      for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) v.push_back(Scalar::from_complex(es.eigenvectors()(r, c)));
      blocks.push_back({Scalar::from_complex(es.eigenvalues()(c)), false, {v}});
    }
  }
  std::stable_sort(blocks.begin(), blocks.end(), [&](const Block& a, const Block& b) {
    auto ia = first_nonzero(a.chain[0], tol), ib = first_nonzero(b.chain[0], tol);
    if (ia != ib) return ia < ib;
    return canonical_less(a.lambda, b.lambda);
  });
  return blocks;
}

}  // namespace detail

/// Checks V'(d) = γ d with γ ≠ 0 and computes the Hessian spectrum, an
/// eigenbasis containing d itself, and the frequency tags.
inline DarbouxData verify_darboux(const HomogeneousPotential& V, const Point& d, double tol = default_tolerance) {
  std::size_t n = V.n();
  if (d.size() != n) fail(ErrorCode::InvalidArgument, "Darboux candidate has wrong dimension");
  if (std::all_of(d.begin(), d.end(), [](const Scalar& x) { return x.is_zero(); }))
    fail(ErrorCode::InvalidArgument, "Darboux candidate must be nonzero");
  auto g = V.gradient(d, tol);
  std::size_t piv = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (d[i].abs() > d[piv].abs()) piv = i;
  Scalar gamma = g[piv] / d[piv];
  double dnorm = 0.0;
  for (const auto& x : d) dnorm = std::max(dnorm, x.abs());
  for (std::size_t i = 0; i < n; ++i) {
    Scalar r = g[i] - gamma * d[i];
    if (!r.approx_zero(tol * std::max(1.0, dnorm) * std::max(1.0, gamma.abs())))
      fail(ErrorCode::NotADarbouxPoint, "V'(d) is not parallel to d (component " + std::to_string(i + 1) + ")");
  }
  if (gamma.approx_zero(tol)) fail(ErrorCode::ZeroMultiplier, "V'(d) = 0: the point is not proper");

  DarbouxData data;
  data.k = V.k();
  data.d = d;
  data.gamma = gamma;
  data.normalized = gamma.is_exact() ? gamma.is_one() : approx_equal(gamma, Scalar(1), tol);
  data.hessian = Matrix::from_rows(V.hessian(d, tol));

  auto blocks = detail::spectral_blocks(data.hessian, tol);
  // Put d itself into the eigenbasis: rescale the chain whose eigenvector is
  // parallel to d, or swap d in for a plain eigenvector of the same eigenvalue.
  Scalar lambda_d = Scalar(V.k() - 1) * gamma;
  bool placed = false;
  for (auto& b : blocks) {
    if (!approx_equal(b.lambda, lambda_d, 1e-9) || !detail::parallel(b.chain[0], d, 1e-9)) continue;
    std::size_t i = detail::first_nonzero(d, tol);
    Scalar c = d[i] / b.chain[0][i];
    for (auto& v : b.chain)
      for (auto& x : v) x *= c;
    b.chain[0] = d;
    placed = true;
    break;
  }
  if (!placed) {
    for (auto& b : blocks) {
      if (b.chain.size() != 1 || !approx_equal(b.lambda, lambda_d, 1e-9)) continue;
      Vector saved = b.chain[0];
      b.chain[0] = d;
      std::vector<Vector> cols;
      for (const auto& bb : blocks) cols.insert(cols.end(), bb.chain.begin(), bb.chain.end());
      if (rank(Matrix::from_columns(cols), 1e-9) == n) {
        placed = true;
        break;
      }
      b.chain[0] = saved;
    }
  }
  if (!placed) fail(ErrorCode::InvalidArgument, "cannot align the Darboux direction with the Jordan basis");

  std::vector<Vector> cols;
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < b.chain.size(); ++j) {
      if (b.chain[j] == d && j == 0) data.darboux_index = cols.size();
      cols.push_back(b.chain[j]);
      data.eigenvalues.push_back(b.lambda);
      data.frequencies.push_back(frequency_from_lambda(b.lambda, b.certified));
      data.jordan_coupling.push_back(false);
      if (j > 0) {
        data.jordan_coupling[cols.size() - 2] = true;
        data.diagonalizable = false;
      }
    }
  }
  data.eigenbasis = Matrix::from_columns(cols);
  data.eigenbasis_inv = inverse(data.eigenbasis, 1e-10);
  return data;
}

struct NormalizedDarboux {
  HomogeneousPotential V;
  DarbouxData data;
  Scalar alpha = Scalar(1);  // d* = alpha d
};

/// Rescales so that γ* = 1: for k = 2 by V → V/γ; otherwise by d → αd with
/// α^{k-2} γ = 1, falling back to V → V/γ when α is not exactly representable.
inline NormalizedDarboux normalize_darboux(const HomogeneousPotential& V, const DarbouxData& data,
                                           double tol = default_tolerance) {
  if (data.normalized) return {V, data, Scalar(1)};
  const Scalar& gamma = data.gamma;
  int m = V.k() - 2;
  std::optional<Scalar> alpha;
  if (m != 0) {
    unsigned e = static_cast<unsigned>(std::abs(m));
    Scalar target = m > 0 ? Scalar(1) / gamma : gamma;  // α^e = target
    if (e == 1) {
      alpha = target;
    } else if (target.is_rational()) {
      Rational t = target.re();
      if (t > 0) {
        if (auto r = rational_root(t, e)) alpha = Scalar(*r);
      } else if (e % 2 == 1) {
        if (auto r = rational_root(Rational(-t), e)) alpha = Scalar(Rational(-*r));
      }
    } else if (target.is_float()) {
      alpha = Scalar::from_complex(std::pow(target.to_complex(), 1.0 / static_cast<double>(e)));
    }
  }
  if (alpha) {
    Point d2;
    for (const auto& x : data.d) d2.push_back(*alpha * x);
    DarbouxData out = verify_darboux(V, d2, tol);
    out.normalized = true;
    out.gamma = Scalar(1);
    return {V, out, *alpha};
  }
  Scalar s = Scalar(1) / gamma;
  HomogeneousPotential W = V.scaled(s);
  DarbouxData out = verify_darboux(W, data.d, tol);
  out.normalized = true;
  out.gamma = Scalar(1);
  out.potential_scale = data.potential_scale * s;
  out.potential_rescaled = true;
  return {W, out, Scalar(1)};
}

/// max_i |V'(d)_i - γ d_i|
inline double darboux_residual(const HomogeneousPotential& V, const DarbouxData& data) {
  auto g = V.gradient(data.d);
  double r = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) r = std::max(r, (g[i] - data.gamma * data.d[i]).abs());
  return r;
}

/// max_i |(V''(d) d)_i - (k-1) γ d_i|
inline double hessian_euler_residual(const DarbouxData& data) {
  Vector hd = data.hessian.apply(data.d);
  double r = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) r = std::max(r, (hd[i] - Scalar(data.k - 1) * data.gamma * data.d[i]).abs());
  return r;
}

}  // namespace vega
