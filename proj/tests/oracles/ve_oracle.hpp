#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "vega/potential.hpp"

namespace oracle {

using cd = std::complex<double>;
using VecFn = std::function<std::vector<cd>(cd)>;

/// k-th derivative of f at t by the trapezoidal rule on |z − t| = r.
inline std::vector<cd> cauchy_derivative(const VecFn& f, cd t, unsigned k, double r = 0.3, int N = 64) {
  std::vector<cd> acc;
  double kf = 1;
  for (unsigned i = 2; i <= k; ++i) kf *= i;
  for (int j = 0; j < N; ++j) {
    cd e = std::polar(r, 2 * std::numbers::pi * j / N);
    auto v = f(t + e);
    if (acc.empty()) acc.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i] / std::pow(e, static_cast<int>(k));
  }
  for (auto& a : acc) a *= kf / N;
  return acc;
}

/// p! [ε^p] F(q0 + Σ_{m≤p} ε^m q_m / m!) with F = −V′.
inline std::vector<cd> ve_rhs(const vega::ForceField& F, const std::vector<cd>& q0, const std::vector<std::vector<cd>>& qm,
                              unsigned p, double r, int N = 64) {
  std::size_t n = q0.size();
  std::vector<cd> acc(n, 0.0);
  for (int j = 0; j < N; ++j) {
    cd eps = std::polar(r, 2 * std::numbers::pi * j / N);
    vega::Point pt;
    for (std::size_t i = 0; i < n; ++i) {
      cd v = q0[i], ep = 1;
      double fact = 1;
      for (unsigned m = 1; m <= p && m <= qm.size(); ++m) {
        ep *= eps;
        fact *= m;
        v += ep * qm[m - 1][i] / fact;
      }
      pt.push_back(vega::Scalar::from_complex(v));
    }
    auto f = F.value(pt);
    for (std::size_t i = 0; i < n; ++i) acc[i] += f[i].to_complex() / std::pow(eps, static_cast<int>(p));
  }
  double pf = 1;
  for (unsigned i = 2; i <= p; ++i) pf *= i;
  for (auto& a : acc) a *= pf / N;
  return acc;
}

}  // namespace oracle
