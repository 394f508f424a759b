#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "vega/rational_function.hpp"

namespace vega {

using Poly = Polynomial<Scalar>;
using RatFun = RationalFunction<Scalar>;
using Point = std::vector<Scalar>;

inline RatFun partial_derivative(const RatFun& f, const MultiIndex& alpha) { return f.partial(alpha); }

inline Scalar evaluate(const RatFun& f, const Point& q, double tol = default_tolerance) {
  return f.evaluate(q, tol);
}

inline RatFun to_float(const RatFun& f) {
  auto cast = [](const Scalar& c) { return c.to_float(); };
  return RatFun(f.numerator().map_coefficients(cast), f.denominator().map_coefficients(cast));
}

/// Memoized partial derivatives of one rational function. Each ∂^α f is built
/// from ∂^{α-ε_j} f with j the first nonzero entry of α. Shared between copies
/// and safe for concurrent readers.
class DerivativeCache {
 public:
  explicit DerivativeCache(RatFun f) : base_(std::move(f)) {}

  const RatFun& function() const { return base_; }

  RatFun get(const MultiIndex& alpha) const {
    if (alpha.order() == 0) return base_;
    {
      std::lock_guard lock(mu_);
      if (auto it = memo_.find(alpha); it != memo_.end()) return it->second;
    }
    std::size_t j = 0;
    while (alpha[j] == 0) ++j;
    MultiIndex parent = alpha;
    --parent[j];
    RatFun result = get(parent).derivative(j);
    std::lock_guard lock(mu_);
    return memo_.try_emplace(alpha, std::move(result)).first->second;
  }

  Scalar at(const MultiIndex& alpha, const Point& q, double tol = default_tolerance) const {
    return get(alpha).evaluate(q, tol);
  }

 private:
  RatFun base_;
  mutable std::mutex mu_;
  mutable std::map<MultiIndex, RatFun, GradedLex> memo_;
};

/// V = N / D with N, D homogeneous; k is the declared degree. The declared
/// degree is not forced to match deg N - deg D so that euler_check can reject it.
class HomogeneousPotential {
 public:
  HomogeneousPotential(std::size_t n, int k, Poly numerator, Poly denominator)
      : n_(n), k_(k) {
    if (n == 0) fail(ErrorCode::InvalidPotential, "need at least one degree of freedom");
    if (k == 0) fail(ErrorCode::InvalidPotential, "homogeneity degree must be nonzero");
    if (numerator.nvars() != n || denominator.nvars() != n)
      fail(ErrorCode::InvalidPotential, "term arity does not match n");
    if (denominator.is_zero()) fail(ErrorCode::InvalidPotential, "zero denominator");
    if (!numerator.is_zero() && !numerator.homogeneous_degree())
      fail(ErrorCode::InvalidPotential, "numerator is not homogeneous");
    if (!denominator.homogeneous_degree()) fail(ErrorCode::InvalidPotential, "denominator is not homogeneous");
    num_ = std::move(numerator);
    den_ = std::move(denominator);
    cache_ = std::make_shared<DerivativeCache>(RatFun(num_, den_));
  }
  HomogeneousPotential(std::size_t n, int k, Poly numerator)
      : HomogeneousPotential(n, k, std::move(numerator), Poly::constant(n, Scalar(1))) {}

  std::size_t n() const { return n_; }
  int k() const { return k_; }
  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  const RatFun& function() const { return cache_->function(); }
  const DerivativeCache& derivatives() const { return *cache_; }

  /// deg N - deg D (the actual degree); nullopt for V = 0.
  std::optional<int> actual_degree() const { return function().homogeneous_degree(); }
  bool degree_consistent() const { return num_.is_zero() || actual_degree() == k_; }

  Scalar value(const Point& q, double tol = default_tolerance) const { return cache_->at(MultiIndex(n_), q, tol); }
  Scalar partial_at(const MultiIndex& alpha, const Point& q, double tol = default_tolerance) const {
    return cache_->at(alpha, q, tol);
  }

  std::vector<Scalar> gradient(const Point& q, double tol = default_tolerance) const {
    std::vector<Scalar> g;
    for (std::size_t i = 0; i < n_; ++i) g.push_back(partial_at(MultiIndex::unit(n_, i), q, tol));
    return g;
  }

  std::vector<std::vector<Scalar>> hessian(const Point& q, double tol = default_tolerance) const {
    std::vector<std::vector<Scalar>> h(n_, std::vector<Scalar>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) {
        h[i][j] = partial_at(MultiIndex::unit(n_, i) + MultiIndex::unit(n_, j), q, tol);
        h[j][i] = h[i][j];
      }
    return h;
  }

  HomogeneousPotential scaled(const Scalar& s) const { return HomogeneousPotential(n_, k_, num_ * s, den_); }

  HomogeneousPotential to_float() const {
    auto cast = [](const Scalar& c) { return c.to_float(); };
    return HomogeneousPotential(n_, k_, num_.map_coefficients(cast), den_.map_coefficients(cast));
  }

 private:
  std::size_t n_;
  int k_;
  Poly num_;
  Poly den_;
  std::shared_ptr<DerivativeCache> cache_;
};

/// F = -∇V, each component with its own derivative cache.
class ForceField {
 public:
  explicit ForceField(const HomogeneousPotential& V) : n_(V.n()), k_(V.k()) {
    for (std::size_t i = 0; i < n_; ++i)
      comps_.push_back(std::make_shared<DerivativeCache>(-V.function().derivative(i)));
  }

  std::size_t n() const { return n_; }
  int k() const { return k_; }
  const RatFun& component(std::size_t i) const { return comps_.at(i)->function(); }

  Scalar partial_at(std::size_t i, const MultiIndex& alpha, const Point& q, double tol = default_tolerance) const {
    return comps_.at(i)->at(alpha, q, tol);
  }

  std::vector<Scalar> value(const Point& q, double tol = default_tolerance) const {
    std::vector<Scalar> f;
    for (std::size_t i = 0; i < n_; ++i) f.push_back(partial_at(i, MultiIndex(n_), q, tol));
    return f;
  }

 private:
  std::size_t n_;
  int k_;
  std::vector<std::shared_ptr<DerivativeCache>> comps_;
};

/// Symmetric s-tensor with n target components: entry(i, α) for |α| = s.
/// Stored sparsely per multi-index, so permutations of an index list share
/// one slot.
class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  SymmetricTensor(std::size_t n, unsigned order) : n_(n), order_(order), comps_(n) {}

  std::size_t n() const { return n_; }
  unsigned order() const { return order_; }

  void set(std::size_t i, const MultiIndex& alpha, const Scalar& v) {
    if (alpha.order() != order_) fail(ErrorCode::InvalidArgument, "tensor multi-index has wrong order");
    if (v.is_zero()) comps_.at(i).erase(alpha);
    else comps_.at(i)[alpha] = v;
  }

  Scalar entry(std::size_t i, const MultiIndex& alpha) const {
    auto it = comps_.at(i).find(alpha);
    return it == comps_.at(i).end() ? Scalar(0) : it->second;
  }
  Scalar entry(std::size_t i, const std::vector<int>& indices) const {
    return entry(i, MultiIndex::from_indices(n_, indices));
  }

  const std::map<MultiIndex, Scalar, GradedLex>& component(std::size_t i) const { return comps_.at(i); }

  bool is_zero(double tol = 0.0) const {
    for (const auto& c : comps_)
      for (const auto& [a, v] : c)
        if (!v.approx_zero(tol)) return false;
    return true;
  }

  /// Multilinear evaluation T_i(v_1, ..., v_s).
  Scalar apply(std::size_t i, const std::vector<std::vector<Scalar>>& vs) const {
    if (vs.size() != order_) fail(ErrorCode::InvalidArgument, "tensor applied to wrong number of vectors");
    Scalar acc(0);
    for (const auto& [alpha, v] : comps_.at(i)) {
      // sum over distinct orderings of the index multiset
      std::vector<int> base = alpha.to_indices();
      do {
        Scalar term = v;
        for (unsigned s = 0; s < order_ && !term.is_zero(); ++s) term = term * vs[s][static_cast<std::size_t>(base[s])];
        acc = acc + term;
      } while (std::next_permutation(base.begin(), base.end()));
    }
    return acc;
  }

  friend bool operator==(const SymmetricTensor&, const SymmetricTensor&) = default;

 private:
  std::size_t n_ = 0;
  unsigned order_ = 0;
  std::vector<std::map<MultiIndex, Scalar, GradedLex>> comps_;
};

/// D^s F(d): entries ∂^α F_i(d) for every |α| = s.
inline SymmetricTensor derivative_tensor(const ForceField& F, const Point& d, unsigned s,
                                         double tol = default_tolerance) {
  if (s == 0) fail(ErrorCode::InvalidOrder, "tensor order must be at least 1");
  SymmetricTensor t(F.n(), s);
  auto alphas = multi_indices_of_order(F.n(), s);
  for (std::size_t i = 0; i < F.n(); ++i)
    for (const auto& a : alphas) t.set(i, a, F.partial_at(i, a, d, tol));
  return t;
}

/// q·∇V(q) - k V(q) vanishes at every sample (exactly, or within tol).
inline bool euler_check(const HomogeneousPotential& V, const std::vector<Point>& samples,
                        double tol = default_tolerance) {
  for (const auto& q : samples) {
    auto g = V.gradient(q, tol);
    Scalar r = -Scalar(V.k()) * V.value(q, tol);
    for (std::size_t i = 0; i < V.n(); ++i) r = r + q[i] * g[i];
    double scale = 1.0;
    for (std::size_t i = 0; i < V.n(); ++i) scale = std::max(scale, (q[i] * g[i]).abs());
    if (!r.approx_zero(tol * scale)) return false;
  }
  return true;
}

}  // namespace vega
