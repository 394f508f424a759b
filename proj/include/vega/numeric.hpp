#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vega/balgebra.hpp"
#include "vega/parallel.hpp"
#include "vega/vebuild.hpp"

namespace vega {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using PhiFn = std::function<cd(cd)>;

// ---------------------------------------------------------------------------
// Contours.

/// A path in complex time: a circle (possibly several turns) or a polyline.
/// Closed contours end exactly at their base point.
class Contour {
 public:
  struct Piece {
    std::function<cd(double)> z;
    std::function<cd(double)> dz;
    double length = 0;
  };

  static Contour circle(cd center, double radius, unsigned steps = 4096, int turns = 1) {
    if (!(radius > 0)) fail(ErrorCode::InvalidArgument, "circle radius must be positive");
    if (turns == 0) fail(ErrorCode::InvalidArgument, "a circle needs at least one turn");
    Contour c;
    c.circle_ = true;
    c.center_ = center;
    c.radius_ = radius;
    c.turns_ = turns;
    c.steps_ = steps;
    c.points_ = {center + radius};
    c.closed_ = true;
    return c;
  }

  static Contour polyline(std::vector<cd> points, unsigned steps = 4096, bool close = false) {
    if (points.size() < 2) fail(ErrorCode::InvalidArgument, "a polyline needs at least two points");
    Contour c;
    if (close && points.back() != points.front()) points.push_back(points.front());
    c.closed_ = points.back() == points.front();
    c.points_ = std::move(points);
    c.steps_ = steps;
    return c;
  }

  static Contour segment(cd a, cd b, unsigned steps = 4096) { return polyline({a, b}, steps); }

  bool is_circle() const { return circle_; }
  bool closed() const { return closed_; }
  cd base() const { return points_.front(); }
  cd end() const { return circle_ ? base() : points_.back(); }
  cd center() const { return center_; }
  double radius() const { return radius_; }
  int turns() const { return turns_; }
  unsigned steps() const { return steps_; }
  const std::vector<cd>& waypoints() const { return points_; }

  Contour with_steps(unsigned steps) const {
    Contour c = *this;
    c.steps_ = steps;
    return c;
  }

  std::vector<Piece> pieces() const {
    std::vector<Piece> out;
    if (circle_) {
      cd c = center_;
      double r = radius_, w = 2 * std::numbers::pi * turns_;
      out.push_back({[=](double s) { return s == 1.0 ? c + r : c + std::polar(r, w * s); },
                     [=](double s) { return cd(0, w) * std::polar(r, w * s); }, std::abs(w) * r});
      return out;
    }
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      cd a = points_[i], b = points_[i + 1];
      out.push_back({[=](double s) { return s == 1.0 ? b : a + (b - a) * s; }, [=](double) { return b - a; },
                     std::abs(b - a)});
    }
    return out;
  }

  /// Steps per piece, proportional to length with at least one each.
  std::vector<unsigned> allocation(unsigned total) const {
    auto ps = pieces();
    double len = 0;
    for (const auto& p : ps) len += p.length;
    std::vector<unsigned> out;
    for (const auto& p : ps)
      out.push_back(std::max(1u, static_cast<unsigned>(std::lround(total * (len > 0 ? p.length / len : 1.0 / ps.size())))));
    return out;
  }

 private:
  bool circle_ = false;
  bool closed_ = false;
  cd center_ = 0;
  double radius_ = 0;
  int turns_ = 1;
  unsigned steps_ = 4096;
  std::vector<cd> points_;
};

// ---------------------------------------------------------------------------
// Systems.

/// Y' = A(t) Y.
struct LinearSystem {
  std::size_t dim = 0;
  std::function<CMatrix(cd)> A;
  /// Distance from t to the nearest singularity of A.
  std::function<double(cd)> singular_distance;
  std::string label;
};

/// y' = f(t, y).
struct FirstOrderSystem {
  std::size_t dim = 0;
  std::function<CVector(cd, const CVector&)> rhs;
  std::function<double(cd)> singular_distance;
  std::string label;
};

inline double distance_to_multiples_of_pi(cd t) {
  double n = std::round(t.real() / std::numbers::pi);
  double best = std::abs(t - n * std::numbers::pi);
  best = std::min(best, std::abs(t - (n - 1) * std::numbers::pi));
  return std::min(best, std::abs(t - (n + 1) * std::numbers::pi));
}

/// The normalized particular solution: sin t for k = 2, the 𝓑-algebra φ for k = −2.
inline PhiFn phi_function(int k, const EnergyRegime& regime = EnergyRegime::zero_energy()) {
  if (k == 2) return [](cd t) { return std::sin(t); };
  if (k == -2) {
    PhiBasis basis(regime, 0.0);
    return [basis](cd t) { return basis.phi(t); };
  }
  fail(ErrorCode::InvalidArgument, "closed-form φ is available for k = 2 and k = -2 only");
}

inline std::function<double(cd)> singular_distance_function(int k, const EnergyRegime& regime = EnergyRegime::zero_energy()) {
  if (k == 2) return distance_to_multiples_of_pi;
  if (k == -2) {
    if (regime.zero) return [](cd t) { return std::abs(t); };
    cd inv = 1.0 / regime.e.to_complex();
    return [inv](cd t) { return std::min(std::abs(t - inv), std::abs(t + inv)); };
  }
  fail(ErrorCode::InvalidArgument, "singularities are known for k = 2 and k = -2 only");
}

/// Φ' = f(t) as the 2×2 system [[0, f], [0, 0]]; the (0, 1) monodromy entry is
/// the jump of ∫f.
inline LinearSystem scalar_integral_system(std::function<cd(cd)> f, std::function<double(cd)> dist,
                                           std::string label = "integral") {
  LinearSystem s;
  s.dim = 2;
  s.A = [f](cd t) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 1) = f(t);
    return a;
  };
  s.singular_distance = std::move(dist);
  s.label = std::move(label);
  return s;
}

/// ∫ e^{iωt}/sin t dt.
inline LinearSystem trig_integral_system(double omega) {
  return scalar_integral_system([omega](cd t) { return std::exp(cd(0, omega) * t) / std::sin(t); },
                                distance_to_multiples_of_pi, "exp(i w t)/sin t");
}

/// First-order linear form of a VE system. VE_1 uses (x_j, ẋ_j); a simple-form
/// VE_2 (sub)system is linearized by adjoining the quadratic monomials of the
/// VE_1 state: [x_s, ẋ_s]_{s ∈ sources}, [u_a u_b]_{a ≤ b}, [z_γ, ż_γ]_{γ ∈ targets}.
struct LinearizedVE {
  LinearSystem system;
  std::vector<std::size_t> sources;
  std::vector<std::size_t> targets;
  /// Offset of the quadratic block and of the target block.
  std::size_t quadratic_offset = 0;
  std::size_t target_offset = 0;

  std::size_t source_index(std::size_t component) const {
    for (std::size_t i = 0; i < sources.size(); ++i)
      if (sources[i] == component) return 2 * i;
    fail(ErrorCode::IndexOutOfRange, "component is not a source of this system");
  }
  std::size_t target_index(std::size_t component) const {
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (targets[i] == component) return target_offset + 2 * i;
    fail(ErrorCode::IndexOutOfRange, "component is not a target of this system");
  }
  /// Position of u_a u_b (a, b index the VE_1 state).
  std::size_t quadratic_index(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    std::size_t m = 2 * sources.size();
    return quadratic_offset + a * (2 * m - a + 1) / 2 + (b - a);
  }
};

namespace detail {

inline std::vector<std::size_t> all_components(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline std::size_t position(const std::vector<std::size_t>& v, std::size_t c) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == c) return i;
  return v.size();
}

/// −φ^{k−2}(Λ + J) on the listed components in (x, ẋ) pairs; couplings must stay inside.
inline void fill_linear_block(CMatrix& a, std::size_t offset, const VESystem& sys, const std::vector<std::size_t>& comps,
                              cd phi_k2) {
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::size_t j = comps[i];
    a(offset + 2 * i, offset + 2 * i + 1) = 1.0;
    a(offset + 2 * i + 1, offset + 2 * i) = -phi_k2 * sys.eigenvalues[j].to_complex();
    if (j < sys.jordan_coupling.size() && sys.jordan_coupling[j]) {
      std::size_t nxt = position(comps, j + 1);
      if (nxt == comps.size()) fail(ErrorCode::InvalidArgument, "Jordan coupling leaves the subsystem");
      a(offset + 2 * i + 1, offset + 2 * nxt) = -phi_k2;
    }
  }
}

}  // namespace detail

inline LinearizedVE linearize_ve(const VESystem& sys, const EnergyRegime& regime = EnergyRegime::zero_energy()) {
  PhiFn phi = phi_function(sys.k, regime);
  LinearizedVE out;
  out.system.singular_distance = singular_distance_function(sys.k, regime);
  out.system.label = sys.label;
  int k = sys.k;
  if (sys.order == 1) {
    out.targets = sys.active_targets.empty() ? detail::all_components(sys.n) : sys.active_targets;
    out.target_offset = 0;
    out.quadratic_offset = 0;
    out.system.dim = 2 * out.targets.size();
    auto targets = out.targets;
    out.system.A = [sys, targets, phi, k](cd t) {
      CMatrix a = CMatrix::Zero(2 * targets.size(), 2 * targets.size());
      detail::fill_linear_block(a, 0, sys, targets, std::pow(phi(t), k - 2));
      return a;
    };
    return out;
  }
  if (sys.order != 2 || !sys.is_simple_form())
    fail(ErrorCode::InvalidOrder, "only VE_1 and simple-form VE_2 systems have a linear first-order form");
  for (const auto& term : sys.forcing)
    if (monomial_degree(term.monomial) != 2) fail(ErrorCode::InvalidArgument, "VE_2 forcing must be quadratic");
  out.sources = sys.active_sources.empty() ? detail::all_components(sys.n) : sys.active_sources;
  out.targets = sys.active_targets.empty() ? detail::all_components(sys.n) : sys.active_targets;
  std::size_t m = 2 * out.sources.size();
  out.quadratic_offset = m;
  out.target_offset = m + m * (m + 1) / 2;
  out.system.dim = out.target_offset + 2 * out.targets.size();
  for (const auto& term : sys.forcing) {
    if (detail::position(out.targets, term.target) == out.targets.size())
      fail(ErrorCode::InvalidArgument, "forcing target outside the subsystem");
    for (const auto& [s, e] : term.monomial)
      if (detail::position(out.sources, s.component) == out.sources.size())
        fail(ErrorCode::InvalidArgument, "forcing source outside the subsystem");
  }
  LinearizedVE layout = out;
  out.system.A = [sys, layout, phi, k, m](cd t) {
    std::size_t dim = layout.system.dim;
    CMatrix a = CMatrix::Zero(dim, dim);
    cd f = phi(t);
    CMatrix a1 = CMatrix::Zero(m, m);
    detail::fill_linear_block(a1, 0, sys, layout.sources, std::pow(f, k - 2));
    a.block(0, 0, m, m) = a1;
    // (u_a u_b)' = Σ_c a1(a,c) u_c u_b + Σ_c a1(b,c) u_a u_c
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) {
        std::size_t row = layout.quadratic_index(i, j);
        for (std::size_t c = 0; c < m; ++c) {
          if (a1(i, c) != 0.0) a(row, layout.quadratic_index(c, j)) += a1(i, c);
          if (a1(j, c) != 0.0) a(row, layout.quadratic_index(i, c)) += a1(j, c);
        }
      }
    CMatrix a2 = CMatrix::Zero(2 * layout.targets.size(), 2 * layout.targets.size());
    detail::fill_linear_block(a2, 0, sys, layout.targets, std::pow(f, k - 2));
    a.block(layout.target_offset, layout.target_offset, a2.rows(), a2.cols()) = a2;
    for (const auto& term : sys.forcing) {
      std::vector<std::size_t> xs;
      for (const auto& [s, e] : term.monomial)
        for (unsigned r = 0; r < e; ++r) xs.push_back(layout.source_index(s.component));
      std::size_t row = layout.target_index(term.target) + 1;
      a(row, layout.quadratic_index(xs[0], xs[1])) += term.coefficient.to_complex() * std::pow(f, term.phi_power);
    }
    return a;
  };
  return out;
}

/// Initial state of a linearized VE_2 from VE_1 data (x, ẋ per source) and
/// target data (z, ż per target).
inline CVector linearized_initial_state(const LinearizedVE& lin, const std::vector<cd>& source_state,
                                        const std::vector<cd>& target_state) {
  std::size_t m = 2 * lin.sources.size();
  if (source_state.size() != m || target_state.size() != 2 * lin.targets.size())
    fail(ErrorCode::InvalidArgument, "initial state has the wrong size");
  CVector y = CVector::Zero(static_cast<Eigen::Index>(lin.system.dim));
  for (std::size_t i = 0; i < m; ++i) y(i) = source_state[i];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) y(lin.quadratic_index(i, j)) = source_state[i] * source_state[j];
  for (std::size_t i = 0; i < target_state.size(); ++i) y(lin.target_offset + i) = target_state[i];
  return y;
}

// ---------------------------------------------------------------------------
// Integration.

struct IntegrationOptions {
  unsigned steps = 4096;
  double clearance = 0.2;
  /// Richardson estimate |Y_N − Y_{N/2}|/15 must stay below this.
  double richardson_tol = 1e-6;
  bool richardson = true;
};

struct FundamentalMatrix {
  CMatrix value;
  cd base = 0;
  cd end = 0;
  std::string system;
  unsigned steps = 0;
  double error_estimate = 0;

  cd determinant() const { return value.determinant(); }
  /// ‖Yᵀ Ω Y − Ω‖ with Ω the standard form on (x, ẋ) pairs.
  double symplectic_defect() const {
    Eigen::Index n = value.rows();
    CMatrix omega = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; i += 2) {
      omega(i, i + 1) = 1.0;
      omega(i + 1, i) = -1.0;
    }
    return (value.transpose() * omega * value - omega).cwiseAbs().maxCoeff();
  }
};

namespace detail {

inline void check_clearance(const Contour& c, const std::function<double(cd)>& dist, double clearance, unsigned steps) {
  if (!dist) return;
  auto ps = c.pieces();
  auto alloc = c.allocation(steps);
  for (std::size_t p = 0; p < ps.size(); ++p)
    for (unsigned i = 0; i <= 2 * alloc[p]; ++i) {
      cd z = ps[p].z(static_cast<double>(i) / (2.0 * alloc[p]));
      if (dist(z) < clearance)
        fail(ErrorCode::SingularityTooClose, "contour passes within " + std::to_string(dist(z)) + " of a singularity");
    }
}

/// Fixed-step RK4 of dy/ds = f(z(s), y) z'(s) along every piece.
template <class State, class F>
State rk4(const Contour& c, State y, unsigned steps, F&& f, std::vector<std::pair<cd, State>>* trace = nullptr) {
  auto ps = c.pieces();
  auto alloc = c.allocation(steps);
  if (trace) trace->push_back({c.base(), y});
  for (std::size_t p = 0; p < ps.size(); ++p) {
    const auto& piece = ps[p];
    double h = 1.0 / alloc[p];
    for (unsigned i = 0; i < alloc[p]; ++i) {
      double s = i * h;
      auto g = [&](double u, const State& v) -> State { return f(piece.z(u), v) * piece.dz(u); };
      State k1 = g(s, y);
      State k2 = g(s + h / 2, State(y + (h / 2) * k1));
      State k3 = g(s + h / 2, State(y + (h / 2) * k2));
      State k4 = g(s + h, State(y + h * k3));
      y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (trace) trace->push_back({piece.z((i + 1) * h), y});
    }
  }
  return y;
}

template <class State>
double max_abs(const State& s) {
  return s.size() ? s.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace detail

/// Transports Y0 along the contour under Y' = A(t) Y.
inline FundamentalMatrix integrate_system(const LinearSystem& sys, const Contour& contour, const CMatrix& y0,
                                          const IntegrationOptions& opt = {}) {
  unsigned steps = opt.steps ? opt.steps : contour.steps();
  if (steps < 8) fail(ErrorCode::StepCountTooSmall, "at least 8 steps are required");
  detail::check_clearance(contour, sys.singular_distance, opt.clearance, steps);
  auto f = [&](cd t, const CMatrix& y) -> CMatrix { return sys.A(t) * y; };
  FundamentalMatrix out;
  out.value = detail::rk4(contour, y0, steps, f);
  out.base = contour.base();
  out.end = contour.end();
  out.system = sys.label;
  out.steps = steps;
  if (opt.richardson) {
    CMatrix coarse = detail::rk4(contour, y0, steps / 2, f);
    out.error_estimate = detail::max_abs(CMatrix(out.value - coarse)) / 15.0;
    if (out.error_estimate > opt.richardson_tol)
      fail(ErrorCode::StepCountTooSmall, "Richardson estimate " + std::to_string(out.error_estimate) + " exceeds tolerance");
  }
  return out;
}

inline FundamentalMatrix integrate_system(const LinearSystem& sys, const Contour& contour,
                                          const IntegrationOptions& opt = {}) {
  return integrate_system(sys, contour, CMatrix::Identity(sys.dim, sys.dim), opt);
}

/// States at every step point of the path.
struct PathSolution {
  std::vector<cd> times;
  std::vector<CVector> states;
  double error_estimate = 0;
};

inline PathSolution integrate_path(const FirstOrderSystem& sys, const Contour& contour, const CVector& y0,
                                   const IntegrationOptions& opt = {}) {
  unsigned steps = opt.steps ? opt.steps : contour.steps();
  if (steps < 8) fail(ErrorCode::StepCountTooSmall, "at least 8 steps are required");
  detail::check_clearance(contour, sys.singular_distance, opt.clearance, steps);
  std::vector<std::pair<cd, CVector>> trace;
  CVector end = detail::rk4(contour, y0, steps, sys.rhs, &trace);
  PathSolution out;
  for (auto& [t, y] : trace) {
    out.times.push_back(t);
    out.states.push_back(std::move(y));
  }
  if (opt.richardson) {
    CVector coarse = detail::rk4(contour, y0, steps / 2, sys.rhs);
    out.error_estimate = detail::max_abs(CVector(end - coarse)) / 15.0;
    if (out.error_estimate > opt.richardson_tol)
      fail(ErrorCode::StepCountTooSmall, "Richardson estimate " + std::to_string(out.error_estimate) + " exceeds tolerance");
  }
  return out;
}

inline FirstOrderSystem as_first_order(const LinearSystem& sys) {
  return {sys.dim, [A = sys.A](cd t, const CVector& y) -> CVector { return A(t) * y; }, sys.singular_distance, sys.label};
}

/// y' = A(t) y + b(t).
inline FirstOrderSystem forced_system(const LinearSystem& sys, std::function<CVector(cd)> b) {
  return {sys.dim, [A = sys.A, b](cd t, const CVector& y) -> CVector { return A(t) * y + b(t); }, sys.singular_distance,
          sys.label + " (forced)"};
}

/// Particular solution X(t) ∫ X⁻¹ b of y' = A y + b with X(base) = I, y(base) = 0,
/// transported jointly as (X, c) with c' = X⁻¹ b.
inline PathSolution variation_of_constants(const LinearSystem& sys, std::function<CVector(cd)> b, const Contour& contour,
                                           const IntegrationOptions& opt = {}) {
  Eigen::Index n = static_cast<Eigen::Index>(sys.dim);
  FirstOrderSystem joint;
  joint.dim = sys.dim * sys.dim + sys.dim;
  joint.singular_distance = sys.singular_distance;
  joint.label = sys.label + " (variation of constants)";
  joint.rhs = [A = sys.A, b, n](cd t, const CVector& y) -> CVector {
    Eigen::Map<const CMatrix> X(y.data(), n, n);
    CVector out(y.size());
    Eigen::Map<CMatrix> dX(out.data(), n, n);
    dX = A(t) * X;
    out.tail(n) = X.partialPivLu().solve(b(t));
    return out;
  };
  CVector y0 = CVector::Zero(static_cast<Eigen::Index>(joint.dim));
  for (Eigen::Index i = 0; i < n; ++i) y0(i * n + i) = 1.0;
  PathSolution raw = integrate_path(joint, contour, y0, opt);
  PathSolution out;
  out.times = raw.times;
  out.error_estimate = raw.error_estimate;
  for (const auto& y : raw.states) {
    Eigen::Map<const CMatrix> X(y.data(), n, n);
    out.states.push_back(X * y.tail(n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monodromy.

/// Fundamental matrix transported once around the circle |t − center| = radius,
/// normalized to the identity at the base point center + radius.
inline FundamentalMatrix monodromy_around(const LinearSystem& sys, cd center, double radius,
                                          const IntegrationOptions& opt = {}, int turns = 1) {
  return integrate_system(sys, Contour::circle(center, radius, opt.steps, turns), opt);
}

/// M_{nπ}: loop around t = nπ; the radius must exclude the neighbouring singularities.
inline FundamentalMatrix monodromy_matrix(const LinearSystem& sys, long long n, double radius,
                                          const IntegrationOptions& opt = {}, int turns = 1) {
  if (!(radius > 0) || radius >= std::numbers::pi)
    fail(ErrorCode::InvalidArgument, "monodromy radius must lie in (0, π)");
  return monodromy_around(sys, cd(std::numbers::pi * static_cast<double>(n), 0.0), radius, opt, turns);
}

/// Independent contours integrated in parallel; results in input order.
inline std::vector<FundamentalMatrix> transport_all(const LinearSystem& sys, const std::vector<Contour>& contours,
                                                    const IntegrationOptions& opt = {}) {
  return parallel_map<FundamentalMatrix>(contours.size(),
                                         [&](std::size_t i) { return integrate_system(sys, contours[i], opt); });
}

struct CommutatorReport {
  double max_norm = 0;
  std::size_t i = 0, j = 0;
  bool non_commuting = false;
  std::string note = "diagnostic only: commuting monodromy does not decide the Galois group";
};

/// max_{i<j} ‖M_i M_j − M_j M_i‖ (entrywise max).
inline CommutatorReport commutator_diagnostic(const std::vector<CMatrix>& ms, double tol = 1e-6) {
  if (ms.size() < 2) fail(ErrorCode::InvalidArgument, "commutator diagnostic needs at least two matrices");
  CommutatorReport r;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      double v = detail::max_abs(CMatrix(ms[i] * ms[j] - ms[j] * ms[i]));
      if (v > r.max_norm) {
        r.max_norm = v;
        r.i = i;
        r.j = j;
      }
    }
  r.non_commuting = r.max_norm > tol;
  return r;
}

// ---------------------------------------------------------------------------
// Residuals.

using SolutionHandle = std::function<CVector(cd)>;
using SecondOrderRhs = std::function<CVector(cd, const CVector&)>;

/// max over samples of ‖ẍ − rhs(t, x)‖∞ with ẍ from a Cauchy integral of radius r.
inline double residual_check(const SolutionHandle& x, const SecondOrderRhs& rhs, const std::vector<cd>& samples,
                             double radius = 0.1, int nodes = 64) {
  double worst = 0;
  for (cd t : samples) {
    CVector acc;
    for (int j = 0; j < nodes; ++j) {
      cd e = std::polar(radius, 2 * std::numbers::pi * j / nodes);
      CVector v = x(t + e);
      if (acc.size() == 0) acc = CVector::Zero(v.size());
      acc += v / (e * e);
    }
    acc *= 2.0 / nodes;
    worst = std::max(worst, detail::max_abs(CVector(acc - rhs(t, x(t)))));
  }
  return worst;
}

/// Same check for a solution sampled on a uniform straight path, with ẍ from the
/// fourth-order central difference; `indices` select interior step points.
inline double residual_check(const PathSolution& sol, const std::function<CVector(const CVector&)>& pick,
                             const SecondOrderRhs& rhs, const std::vector<std::size_t>& indices) {
  double worst = 0;
  for (std::size_t i : indices) {
    if (i < 2 || i + 2 >= sol.times.size()) fail(ErrorCode::InvalidArgument, "sample index too close to the path ends");
    cd h = sol.times[i + 1] - sol.times[i];
    CVector d2 = (-pick(sol.states[i + 2]) + 16.0 * pick(sol.states[i + 1]) - 30.0 * pick(sol.states[i]) +
                  16.0 * pick(sol.states[i - 1]) - pick(sol.states[i - 2])) /
                 (12.0 * h * h);
    worst = std::max(worst, detail::max_abs(CVector(d2 - rhs(sol.times[i], sol.states[i]))));
  }
  return worst;
}

/// Right-hand side of the target equations of a VE system at time t, given
/// source values x_{j,m}(t) and target values.
inline std::vector<cd> ve_rhs(const VESystem& sys, const PhiFn& phi, cd t, const std::map<Source, cd>& sources,
                              const std::vector<cd>& targets) {
  cd f = phi(t);
  std::vector<cd> out(sys.n, 0.0);
  cd lin = std::pow(f, sys.k - 2);
  for (std::size_t j = 0; j < sys.n; ++j) {
    out[j] = -lin * sys.eigenvalues[j].to_complex() * targets[j];
    if (j + 1 < sys.n && j < sys.jordan_coupling.size() && sys.jordan_coupling[j]) out[j] -= lin * targets[j + 1];
  }
  for (const auto& term : sys.forcing) {
    cd v = term.coefficient.to_complex() * std::pow(f, term.phi_power);
    for (const auto& [s, e] : term.monomial) {
      auto it = sources.find(s);
      if (it == sources.end()) fail(ErrorCode::InvalidArgument, "missing source value");
      v *= std::pow(it->second, static_cast<int>(e));
    }
    out[term.target] += v;
  }
  return out;
}

}  // namespace vega
