#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "vega/errors.hpp"
#include "vega/scalar.hpp"

namespace vega {

/// Exponent vector alpha in N^n. |alpha| is the order, alpha! the product of
/// factorials of the entries.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : e_(n, 0) {}
  MultiIndex(std::initializer_list<unsigned> e) : e_(e) {}
  explicit MultiIndex(std::vector<unsigned> e) : e_(std::move(e)) {}

  static MultiIndex unit(std::size_t n, std::size_t i) {
    MultiIndex m(n);
    m.e_.at(i) = 1;
    return m;
  }

  /// Multi-index counting how often each variable occurs in an index list.
  static MultiIndex from_indices(std::size_t n, const std::vector<int>& idx) {
    MultiIndex m(n);
    for (int i : idx) {
      if (i < 0 || static_cast<std::size_t>(i) >= n) fail(ErrorCode::IndexOutOfRange, "tensor index");
      ++m.e_[static_cast<std::size_t>(i)];
    }
    return m;
  }

  std::size_t size() const { return e_.size(); }
  unsigned operator[](std::size_t i) const { return e_[i]; }
  unsigned& operator[](std::size_t i) { return e_[i]; }
  const std::vector<unsigned>& exponents() const { return e_; }

  unsigned order() const { return std::accumulate(e_.begin(), e_.end(), 0u); }

  BigInt factorial() const {
    BigInt f = 1;
    for (unsigned a : e_)
      for (unsigned j = 2; j <= a; ++j) f *= j;
    return f;
  }

  /// Index list with each variable repeated alpha_i times (ascending).
  std::vector<int> to_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < e_.size(); ++i)
      for (unsigned j = 0; j < e_[i]; ++j) out.push_back(static_cast<int>(i));
    return out;
  }

  bool divides(const MultiIndex& o) const {
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] > o.e_[i]) return false;
    return true;
  }

  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
    for (std::size_t i = 0; i < a.e_.size(); ++i) a.e_[i] += b.e_[i];
    return a;
  }
  friend MultiIndex operator-(MultiIndex a, const MultiIndex& b) {
    for (std::size_t i = 0; i < a.e_.size(); ++i) {
      if (b.e_[i] > a.e_[i]) fail(ErrorCode::InvalidArgument, "negative multi-index");
      a.e_[i] -= b.e_[i];
    }
    return a;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) s += (i ? "," : "") + std::to_string(e_[i]);
    return s + ")";
  }

 private:
  std::vector<unsigned> e_;
};

/// Graded lexicographic order: lower total degree first; within a degree the
/// exponent vector that is lexicographically larger comes first, so
/// q1^2 < q1 q2 < q2^2.
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    unsigned da = a.order(), db = b.order();
    if (da != db) return da < db;
    return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                        a.exponents().begin(), a.exponents().end());
  }
};

/// All multi-indices of length n and order s, in graded-lex order.
inline std::vector<MultiIndex> multi_indices_of_order(std::size_t n, unsigned s) {
  std::vector<MultiIndex> out;
  if (n == 0) return out;
  MultiIndex cur(n);
  // Recursive fill: first coordinate takes the largest share first.
  auto rec = [&](auto&& self, std::size_t pos, unsigned left) -> void {
    if (pos + 1 == n) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (unsigned a = left + 1; a-- > 0;) {
      cur[pos] = a;
      self(self, pos + 1, left - a);
    }
  };
  rec(rec, 0, s);
  return out;
}

}  // namespace vega
