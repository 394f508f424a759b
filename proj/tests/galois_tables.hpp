#pragma once

#include <algorithm>

#include "potentials.hpp"
#include "vega/galois_k2.hpp"

namespace vega::testing {

inline std::vector<Frequency> probe_frequencies() {
  return {frequency_from_lambda(q(0)), frequency_from_lambda(q(1)), frequency_from_lambda(q(4)),
          frequency_from_lambda(q(2))};
}

// Second level integrals t^d e^{iνt} / sin t listed in the case tables; ν is
// given by coefficients over the input frequencies.
struct Entry {
  unsigned d;
  std::vector<long long> c;
};

inline std::vector<Entry> table_va1(bool za, bool zg) {
  if (za && zg) return {{0, {0, 0}}, {1, {0, 0}}, {2, {0, 0}}, {3, {0, 0}}};
  if (za) {
    std::vector<Entry> e;
    for (unsigned d = 0; d <= 2; ++d) {
      e.push_back({d, {0, 1}});
      e.push_back({d, {0, -1}});
    }
    return e;
  }
  if (zg) return {{0, {0, 0}}, {0, {2, 0}}, {0, {-2, 0}}, {1, {0, 0}}, {1, {2, 0}}, {1, {-2, 0}}};
  return {{0, {0, 1}}, {0, {0, -1}}, {0, {2, 1}}, {0, {2, -1}}, {0, {-2, 1}}, {0, {-2, -1}}};
}

inline std::vector<Entry> table_va2(bool za, bool zb, bool zg) {
  // α and β are symmetric; put the nonzero one first
  bool swapped = za && !zb;
  if (swapped) std::swap(za, zb);
  auto fix = [&](std::vector<Entry> e) {
    if (swapped)
      for (auto& x : e) std::swap(x.c[0], x.c[1]);
    return e;
  };
  std::vector<Entry> e;
  auto pm = [&](unsigned dmax, std::vector<std::vector<long long>> cs) {
    for (unsigned d = 0; d <= dmax; ++d)
      for (auto& c : cs) e.push_back({d, c});
  };
  if (za && zb && zg) pm(3, {{0, 0, 0}});
  else if (za && zb) pm(2, {{0, 0, 1}, {0, 0, -1}});
  else if (zb && zg) pm(2, {{1, 0, 0}, {-1, 0, 0}});
  else if (zb) pm(1, {{1, 0, 1}, {1, 0, -1}, {-1, 0, 1}, {-1, 0, -1}});
  else if (zg) pm(1, {{1, 1, 0}, {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0}});
  else pm(0, {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}, {-1, 1, 1}, {-1, 1, -1}, {-1, -1, 1}, {-1, -1, -1}});
  return fix(e);
}

// Abelian iff θ = 0, or the frequency field is algebraic over K (all ω ∈ ℚ*),
// or no listed integral is non-meromorphic.
inline Status classifier_route(bool theta_zero, const std::vector<Frequency>& f, const std::vector<Entry>& table) {
  if (theta_zero) return Status::VirtuallyAbelian;
  if (std::all_of(f.begin(), f.end(), [](const Frequency& x) { return x.tag == FrequencyTag::NonzeroRational; }))
    return Status::VirtuallyAbelian;
  for (const auto& e : table) {
    Scalar nu(0);
    for (std::size_t i = 0; i < f.size(); ++i) nu += Scalar(e.c[i]) * f[i].omega;
    auto spec = e.d == 0 ? TrigIntegralSpec::trigonometric(nu) : TrigIntegralSpec::mixed(e.d, nu);
    if (!classify(spec).meromorphic) return Status::NotVirtuallyAbelian;
  }
  return Status::VirtuallyAbelian;
}

inline bool expected_iff(bool theta_zero, const std::vector<Frequency>& f) {
  return theta_zero ||
         std::all_of(f.begin(), f.end(), [](const Frequency& x) { return x.tag == FrequencyTag::NonzeroRational; });
}

}  // namespace vega::testing
