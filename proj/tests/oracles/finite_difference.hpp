#pragma once

// Exact-arithmetic central finite differences. The step is a rational number,
// so the only error is truncation (O(h^2) per direction).

#include <functional>
#include <vector>

#include "vega/scalar.hpp"

namespace vega::oracle {

using Fn = std::function<Scalar(const std::vector<Scalar>&)>;

/// Mixed partial ∂^α f(q) by nested central differences with step h.
inline Scalar central_difference(const Fn& f, std::vector<Scalar> q, const std::vector<unsigned>& alpha,
                                 const Rational& h) {
  std::size_t i = 0;
  while (i < alpha.size() && alpha[i] == 0) ++i;
  if (i == alpha.size()) return f(q);
  std::vector<unsigned> rest = alpha;
  --rest[i];
  Scalar x = q[i];
  q[i] = x + Scalar(h);
  Scalar up = central_difference(f, q, rest, h);
  q[i] = x - Scalar(h);
  Scalar down = central_difference(f, q, rest, h);
  return (up - down) / Scalar(Rational(2 * h));
}

}  // namespace vega::oracle
