#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "vega/galois_k2.hpp"
#include "vega/io.hpp"
#include "vega/km2.hpp"
#include "vega/numeric.hpp"
#include "vega/trig.hpp"

namespace vega {

inline constexpr const char* tool_version = "1.0.0";

/// Exit status classes of the command line tool.
enum class Outcome { Ok = 0, Error = 1, Obstruction = 2, Inconclusive = 3 };

struct Report {
  json body;
  Outcome outcome = Outcome::Ok;
  int exit_code() const { return static_cast<int>(outcome); }
};

/// Sorted keys, two-space indentation, trailing newline.
inline std::string render_json(const Report& r) { return r.body.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Serialization of analysis structures.

inline json to_json(const Frequency& f) {
  return {{"lambda", to_json(f.lambda)}, {"omega", to_json(f.omega)}, {"tag", std::string(to_string(f.tag))}};
}

inline json to_json(const MeromorphyVerdict& v) {
  return {{"meromorphic", v.meromorphic},
          {"reason", to_string(v.reason)},
          {"witness", to_json(v.witness)},
          {"published_set_discrepancy", v.published_set_discrepancy}};
}

inline MeromorphyVerdict meromorphy_verdict_from_json(const json& j) {
  MeromorphyVerdict v;
  v.meromorphic = j.at("meromorphic").get<bool>();
  std::string reason = j.at("reason").get<std::string>();
  for (auto r : {MeromorphyReason::ClassifierEven, MeromorphyReason::ClassifierOdd, MeromorphyReason::SimplePoleJump,
                 MeromorphyReason::ProductZero})
    if (to_string(r) == reason) v.reason = r;
  v.witness = scalar_from_json(j.at("witness"), "/witness");
  v.published_set_discrepancy = j.at("published_set_discrepancy").get<bool>();
  return v;
}

inline const char* to_string(TrigKind k) {
  switch (k) {
    case TrigKind::T: return "T";
    case TrigKind::P: return "P";
    case TrigKind::M: return "M";
  }
  return "?";
}

inline json to_json(const TrigIntegralSpec& s) {
  return {{"kind", to_string(s.kind)}, {"omega", to_json(s.omega)}, {"d", s.d}, {"n", s.n}};
}

inline TrigIntegralSpec trig_spec_from_json(const json& j) {
  TrigIntegralSpec s;
  std::string kind = j.at("kind").get<std::string>();
  s.kind = kind == "P" ? TrigKind::P : kind == "M" ? TrigKind::M : TrigKind::T;
  s.omega = scalar_from_json(j.at("omega"), "/omega");
  s.d = j.at("d").get<unsigned>();
  s.n = j.at("n").get<unsigned>();
  return s;
}

namespace detail {

inline json index_json(const std::optional<std::size_t>& i) { return i ? json(*i + 1) : json(nullptr); }
inline std::optional<std::size_t> index_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>() - 1;
}

inline FrequencyTag tag_from_string(const std::string& s) {
  for (auto t : {FrequencyTag::Zero, FrequencyTag::NonzeroRational, FrequencyTag::Irrational, FrequencyTag::Undetermined})
    if (to_string(t) == s) return t;
  fail(ErrorCode::ParseError, "unknown frequency tag '" + s + "'");
}

}  // namespace detail

/// Indices are written 1-based.
inline json to_json(const Witness& w) {
  json tags = json::array();
  for (auto t : w.tags) tags.push_back(std::string(to_string(t)));
  return {{"subsystem", w.subsystem},
          {"alpha", detail::index_json(w.alpha)},
          {"beta", detail::index_json(w.beta)},
          {"gamma", detail::index_json(w.gamma)},
          {"multi_index", w.multi_index ? to_json(*w.multi_index) : json(nullptr)},
          {"coefficient", to_json(w.coefficient)},
          {"tags", tags},
          {"table_case", w.table_case},
          {"integral", w.integral ? to_json(*w.integral) : json(nullptr)},
          {"integral_verdict", w.integral_verdict ? to_json(*w.integral_verdict) : json(nullptr)}};
}

inline Witness witness_from_json(const json& j) {
  Witness w;
  w.subsystem = j.at("subsystem").get<std::string>();
  w.alpha = detail::index_from_json(j.at("alpha"));
  w.beta = detail::index_from_json(j.at("beta"));
  w.gamma = detail::index_from_json(j.at("gamma"));
  if (!j.at("multi_index").is_null()) w.multi_index = MultiIndex(j.at("multi_index").get<std::vector<unsigned>>());
  w.coefficient = scalar_from_json(j.at("coefficient"), "/coefficient");
  for (const auto& t : j.at("tags")) w.tags.push_back(detail::tag_from_string(t.get<std::string>()));
  w.table_case = j.at("table_case").get<int>();
  if (!j.at("integral").is_null()) w.integral = trig_spec_from_json(j.at("integral"));
  if (!j.at("integral_verdict").is_null()) w.integral_verdict = meromorphy_verdict_from_json(j.at("integral_verdict"));
  return w;
}

inline json to_json(const Verdict& v) {
  return {{"status", to_string(v.status)},
          {"order_reached", v.order_reached},
          {"witness", v.witness ? to_json(*v.witness) : json(nullptr)}};
}

inline Verdict verdict_from_json(const json& j) {
  Verdict v;
  std::string s = j.at("status").get<std::string>();
  for (auto st : {Status::VirtuallyAbelian, Status::NotVirtuallyAbelian, Status::Inconclusive})
    if (to_string(st) == s) v.status = st;
  v.order_reached = j.at("order_reached").get<unsigned>();
  if (!j.at("witness").is_null()) v.witness = witness_from_json(j.at("witness"));
  return v;
}

/// One table per order: [{"order": p, "components": [{"target": j, "entries": [...]}]}].
inline json xi_tables_json(const Certificate& c) {
  json out = json::array();
  for (std::size_t i = 0; i < c.xi_tables.size(); ++i) {
    json comps = json::array();
    for (std::size_t j = 0; j < c.xi_tables[i].size(); ++j) {
      json entries = json::array();
      for (const auto& [alpha, v] : c.xi_tables[i][j]) entries.push_back({{"alpha", to_json(alpha)}, {"value", to_json(v)}});
      comps.push_back({{"target", j + 1}, {"entries", entries}});
    }
    out.push_back({{"order", i + 2}, {"components", comps}});
  }
  return out;
}

inline json to_json(const Certificate& c) {
  return {{"p_max", c.p_max},
          {"xi_tables", xi_tables_json(c)},
          {"euler_chain", to_json(c.euler_chain)},
          {"euler_chain_consistent", c.euler_chain_consistent},
          {"taylor_coefficients_vanish", c.taylor_coefficients_vanish},
          {"simple_form_propagates", c.simple_form_propagates}};
}

inline Certificate certificate_from_json(const json& j) {
  Certificate c;
  c.p_max = j.at("p_max").get<unsigned>();
  for (const auto& table : j.at("xi_tables")) {
    std::vector<std::map<MultiIndex, Scalar, GradedLex>> comps;
    for (const auto& comp : table.at("components")) {
      std::map<MultiIndex, Scalar, GradedLex> m;
      for (const auto& e : comp.at("entries"))
        m[MultiIndex(e.at("alpha").get<std::vector<unsigned>>())] = scalar_from_json(e.at("value"), "/value");
      comps.push_back(std::move(m));
    }
    c.xi_tables.push_back(std::move(comps));
  }
  for (const auto& s : j.at("euler_chain")) c.euler_chain.push_back(scalar_from_json(s, "/euler_chain"));
  c.euler_chain_consistent = j.at("euler_chain_consistent").get<bool>();
  c.taylor_coefficients_vanish = j.at("taylor_coefficients_vanish").get<bool>();
  c.simple_form_propagates = j.at("simple_form_propagates").get<bool>();
  return c;
}

/// θ^γ_{αβ} with α ≤ β, graded-lex over (γ, α, β); zero entries omitted.
inline json theta_table_json(const SymmetricTensor& theta) {
  json out = json::array();
  for (std::size_t g = 0; g < theta.n(); ++g)
    for (const auto& [alpha, v] : theta.component(g)) {
      if (v.is_zero()) continue;
      auto idx = alpha.to_indices();
      json ij = json::array();
      for (int i : idx) ij.push_back(i + 1);
      out.push_back({{"gamma", g + 1}, {"indices", ij}, {"value", to_json(v)}});
    }
  return out;
}

inline json to_json(const DarbouxData& d) {
  json freqs = json::array();
  for (const auto& f : d.frequencies) freqs.push_back(to_json(f));
  json coupling = json::array();
  for (bool b : d.jordan_coupling) coupling.push_back(b);
  return {{"point", to_json(d.d)},
          {"gamma", to_json(d.gamma)},
          {"normalized", d.normalized},
          {"potential_scale", to_json(d.potential_scale)},
          {"potential_rescaled", d.potential_rescaled},
          {"eigenvalues", to_json(d.eigenvalues)},
          {"frequencies", freqs},
          {"diagonalizable", d.diagonalizable},
          {"jordan_coupling", coupling},
          {"darboux_index", d.darboux_index + 1}};
}

inline json error_json(const Error& e) {
  return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
}

inline json complex_json(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Pipelines.

struct RunOptions {
  std::optional<unsigned> p_max;
  std::optional<bool> exact;
  std::optional<double> tolerance;
  std::optional<bool> assert_independence;
  std::vector<Scalar> energies;
  std::optional<unsigned> seed;
};

namespace detail {

inline Problem with_overrides(Problem p, const RunOptions& o) {
  if (o.p_max) p.options.p_max = *o.p_max;
  if (o.exact) p.options.exact = *o.exact;
  if (o.tolerance) p.options.tolerance = *o.tolerance;
  if (o.assert_independence) p.options.assert_independence = *o.assert_independence;
  if (!o.energies.empty()) p.options.energies = o.energies;
  if (o.seed) p.options.seed = *o.seed;
  return p;
}

inline json header(const std::string& command, const Problem& p) {
  json energies = json::array();
  for (const auto& e : p.options.energies) energies.push_back(to_json(e));
  return {{"tool", {{"name", "vega"}, {"version", tool_version}}},
          {"command", command},
          {"problem", {{"name", p.name}, {"n", p.n}, {"k", p.k}}},
          {"options",
           {{"mode", p.options.exact ? "exact" : "float"},
            {"tolerance", p.options.tolerance},
            {"p_max", p.options.p_max},
            {"energies", energies},
            {"assert_independence", p.options.assert_independence},
            {"seed", p.options.seed}}}};
}

inline Outcome combine(Outcome a, Outcome b) {
  auto rank = [](Outcome o) {
    switch (o) {
      case Outcome::Obstruction: return 3;
      case Outcome::Inconclusive: return 2;
      case Outcome::Error: return 1;
      case Outcome::Ok: return 0;
    }
    return 0;
  };
  return rank(a) >= rank(b) ? a : b;
}

}  // namespace detail

/// k = 2: verify → spectrum → verdict_ve2 → inductive_analysis, per candidate.
inline Report cmd_analyze(const Problem& problem, const RunOptions& run = {}) {
  Problem p = detail::with_overrides(problem, run);
  Report r;
  r.body = detail::header("analyze", p);
  json points = json::array();
  bool any_ok = false;
  Outcome outcome = Outcome::Ok;
  Status overall = Status::VirtuallyAbelian;
  double tol = p.options.tolerance;
  if (p.k != 2) {
    r.body["errors"] = json::array({error_json(Error(ErrorCode::InvalidArgument, "analyze requires k = 2"))});
    r.body["status"] = nullptr;
    r.outcome = Outcome::Error;
    return r;
  }
  if (p.darboux_candidates.empty()) {
    r.body["errors"] = json::array({error_json(Error(ErrorCode::InvalidArgument, "no Darboux candidates given"))});
    r.body["status"] = nullptr;
    r.outcome = Outcome::Error;
    return r;
  }
  HomogeneousPotential V = p.potential();
  for (const auto& cand : p.candidates()) {
    json entry;
    entry["candidate"] = to_json(cand);
    json errors = json::array();
    try {
      auto nd = normalize_darboux(V, verify_darboux(V, cand, tol), tol);
      entry["darboux"] = to_json(nd.data);
      auto rc = classify_resonance(nd.data.frequencies, p.options.assert_independence);
      json witness = rc.witness ? json::array() : json(nullptr);
      if (rc.witness)
        for (const auto& c : *rc.witness) witness.push_back(c.str());
      entry["resonance"] = {{"z_independent", std::string(to_string(rc.z_linear_independent))}, {"relation", witness}};
      entry["theta"] = theta_table_json(coupling_theta(nd.V, nd.data));
      Verdict v = verdict_ve2(nd.V, nd.data, tol);
      entry["verdict"] = to_json(v);
      Status status = v.status;
      if (v.status == Status::VirtuallyAbelian && p.options.p_max >= 2) {
        try {
          auto ind = inductive_analysis(nd.V, nd.data, p.options.p_max, p.options.assert_independence, tol);
          entry["inductive"] = {{"verdict", to_json(ind.verdict)}, {"certificate", to_json(ind.certificate)}};
          status = ind.verdict.status;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NonResonanceNotEstablished) throw;
          entry["inductive"] = {{"skipped", error_json(e)}};
        }
      }
      entry["status"] = to_string(status);
      if (status == Status::NotVirtuallyAbelian) overall = status;
      else if (status == Status::Inconclusive && overall == Status::VirtuallyAbelian) overall = status;
      any_ok = true;
    } catch (const Error& e) {
      errors.push_back(error_json(e));
      entry["status"] = nullptr;
    }
    entry["errors"] = errors;
    points.push_back(entry);
  }
  r.body["darboux_points"] = points;
  r.body["errors"] = json::array();
  if (!any_ok) {
    r.body["status"] = nullptr;
    r.outcome = Outcome::Error;
    return r;
  }
  r.body["status"] = to_string(overall);
  outcome = overall == Status::NotVirtuallyAbelian ? Outcome::Obstruction
            : overall == Status::Inconclusive     ? Outcome::Inconclusive
                                                  : Outcome::Ok;
  r.outcome = outcome;
  return r;
}

/// Twenty real sample times away from the branch points of φ.
inline std::vector<double> km2_samples(const EnergyRegime& r) {
  double lo = r.zero ? 1.5 : 1.0 / std::abs(r.e.to_complex()) + 1.0;
  double hi = lo + (r.zero ? 2.5 : 3.0);
  std::vector<double> t;
  for (int i = 0; i < 20; ++i) t.push_back(lo + (hi - lo) * i / 19.0);
  return t;
}

/// max over orders, components and samples of |ẍ − RHS| for x_{j,m} = φ B_{m,j},
/// with ẍ from a Cauchy integral and RHS the VE equations in eigen coordinates.
inline double km2_numeric_residual(const Km2Solution& sol, const std::vector<double>& samples) {
  PhiBasis basis(sol.regime);
  PhiFn phi = [&](cd t) { return basis.phi(t); };
  double worst = 0;
  for (unsigned p = 1; p <= sol.p_max; ++p) {
    const VESystem& sys = sol.chain[p - 1];
    std::size_t n = sys.n;
    auto x_at = [&](unsigned m, cd t) {
      CVector v(static_cast<Eigen::Index>(n));
      cd f = basis.phi(t);
      for (std::size_t j = 0; j < n; ++j) v(j) = f * eval_belement(sol.B[m - 1][j], t);
      return v;
    };
    for (double t : samples) {
      std::map<Source, cd> sources;
      for (unsigned m = 1; m < p; ++m) {
        CVector xm = x_at(m, t);
        for (std::size_t j = 0; j < n; ++j) sources[Source{j, m}] = xm(j);
      }
      SolutionHandle h = [&](cd z) { return x_at(p, z); };
      SecondOrderRhs rhs = [&](cd z, const CVector& x) {
        std::vector<cd> targets(x.data(), x.data() + x.size());
        auto v = ve_rhs(sys, phi, z, sources, targets);
        return CVector(Eigen::Map<CVector>(v.data(), static_cast<Eigen::Index>(v.size())));
      };
      worst = std::max(worst, residual_check(h, rhs, {cd(t)}, 0.25, 64));
    }
  }
  return worst;
}

/// k = −2: verify → solve_ve_chain_km2 per energy → symbolic and numeric residuals.
inline Report cmd_km2(const Problem& problem, const RunOptions& run = {}) {
  Problem p = detail::with_overrides(problem, run);
  Report r;
  r.body = detail::header("km2", p);
  r.body["errors"] = json::array();
  if (p.k != -2 || p.darboux_candidates.empty()) {
    r.body["errors"].push_back(error_json(Error(ErrorCode::InvalidArgument, "km2 requires k = -2 and a Darboux candidate")));
    r.body["status"] = nullptr;
    r.outcome = Outcome::Error;
    return r;
  }
  HomogeneousPotential V = p.potential();
  json points = json::array();
  bool all_ok = true, any_ok = false;
  for (const auto& cand : p.candidates()) {
    json entry;
    entry["candidate"] = to_json(cand);
    json errors = json::array();
    try {
      auto nd = normalize_darboux(V, verify_darboux(V, cand, p.options.tolerance), p.options.tolerance);
      entry["darboux"] = to_json(nd.data);
      json regimes = json::array();
      auto seeds = km2_seeds(nd.data.n(), p.options.seed);
      for (const auto& e : p.options.energies) {
        EnergyRegime regime = regime_from_scalar(e);
        json rj;
        rj["energy"] = to_json(regime);
        json basis = json::array();
        for (std::size_t j = 0; j < nd.data.n(); ++j) {
          auto [h1, h2] = solve_homogeneous(nd.data.eigenvalues[j], regime);
          basis.push_back({{"component", j + 1},
                           {"lambda", to_json(nd.data.eigenvalues[j])},
                           {"omega", to_json(omega_from_lambda_km2(nd.data.eigenvalues[j]))},
                           {"basis", json::array({to_json(h1), to_json(h2)})}});
        }
        rj["homogeneous_basis"] = basis;
        if (p.options.p_max < 2) {
          regimes.push_back(rj);
          continue;
        }
        auto sol = solve_ve_chain_km2(nd.V, nd.data, p.options.p_max, regime, seeds);
        json orders = json::array();
        for (unsigned m = 1; m <= sol.p_max; ++m) {
          json comps = json::array();
          for (std::size_t j = 0; j < nd.data.n(); ++j)
            comps.push_back({{"component", j + 1},
                             {"cofactor", to_json(sol.B[m - 1][j])},
                             {"forcing", to_json(sol.forcing[m - 1][j])},
                             {"symbolic_residual_zero", sol.residuals[m - 1][j].is_zero(nd.data.eigenvalues[j].is_exact() ? 0.0 : 1e-9)}});
          orders.push_back({{"order", m}, {"components", comps}});
        }
        rj["orders"] = orders;
        rj["all_symbolic_residuals_zero"] = sol.all_residuals_zero;
        auto samples = km2_samples(regime);
        double res = km2_numeric_residual(sol, samples);
        rj["numeric_residual_max"] = res;
        rj["samples"] = samples.size();
        bool certified = sol.all_residuals_zero && res < 1e-8;
        rj["containment_certified"] = certified;
        all_ok = all_ok && certified;
        regimes.push_back(rj);
      }
      entry["regimes"] = regimes;
      any_ok = true;
    } catch (const Error& e) {
      errors.push_back(error_json(e));
      all_ok = false;
    }
    entry["errors"] = errors;
    points.push_back(entry);
  }
  r.body["darboux_points"] = points;
  r.body["status"] = any_ok && all_ok ? json("Certified") : any_ok ? json("Inconclusive") : json(nullptr);
  r.outcome = !any_ok ? Outcome::Error : all_ok ? Outcome::Ok : Outcome::Inconclusive;
  return r;
}

/// Parses ω as an exact number or sqrt(q).
inline Scalar parse_omega(const std::string& text) {
  std::string s = text;
  if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') return Scalar(detail::parse_rational(s.substr(5, s.size() - 6))).sqrt();
  return Scalar(detail::parse_rational(s));
}

/// Classification, reduction and jump of T_n^(ω).
inline Report cmd_trig(unsigned n, const Scalar& omega, double tol = default_tolerance) {
  Report r;
  r.body = {{"tool", {{"name", "vega"}, {"version", tool_version}}}, {"command", "trig"}, {"n", n}, {"omega", to_json(omega)}};
  r.body["errors"] = json::array();
  try {
    auto v = classify_meromorphy(n, omega, tol);
    r.body["verdict"] = to_json(v);
    auto red = reduce(n, omega);
    r.body["reduction"] = {{"meromorphic_part", red.meromorphic_part.to_string()},
                           {"tail_order", red.tail_order},
                           {"p", to_json(red.p)},
                           {"p_product", to_json(red.p_product)},
                           {"a_n", to_json(red.a_n)}};
    Scalar res = laurent_residue(n, omega);
    r.body["residue_at_zero"] = to_json(res);
    cd w = omega.to_complex();
    auto sys = scalar_integral_system([w, n](cd t) { return std::exp(cd(0, 1) * w * t) / std::pow(std::sin(t), static_cast<int>(n)); },
                                      distance_to_multiples_of_pi, "T_n");
    cd numeric = monodromy_matrix(sys, 0, 1.0).value(0, 1);
    cd analytic = 2.0 * std::numbers::pi * cd(0, 1) * res.to_complex();
    r.body["jump_at_zero"] = {{"analytic", complex_json(analytic)},
                              {"numeric", complex_json(numeric)},
                              {"difference", std::abs(numeric - analytic)}};
    json notes = json::array();
    if (n == 2 && omega.is_zero()) notes.push_back("T_2^(0) = -cot t");
    else if (v.meromorphic && red.tail_order == 2 && omega.is_zero()) notes.push_back("tail T_2^(0) = -cot t is meromorphic");
    if (n == 1) notes.push_back("simple pole: the jump around t = 0 is 2 pi i");
    if (v.reason == MeromorphyReason::ProductZero) notes.push_back("the product of recurrence coefficients vanishes");
    if (v.published_set_discrepancy) notes.push_back("the closed-form frequency set disagrees with the residue for this (n, omega)");
    r.body["notes"] = notes;
    r.body["status"] = v.meromorphic ? "Meromorphic" : "NotMeromorphic";
    r.outcome = v.meromorphic ? Outcome::Ok : Outcome::Obstruction;
  } catch (const Error& e) {
    r.body["errors"].push_back(error_json(e));
    r.body["status"] = nullptr;
    r.outcome = Outcome::Error;
  }
  return r;
}

struct MonodromyOptions {
  long long singularity = 0;
  double radius = 1.0;
  unsigned steps = 4096;
  double commutator_tol = 1e-6;
};

/// k = 2: M_{nπ} of VE_1 and of every VE_{2,α}^γ with θ^γ_{αα} ≠ 0, with the
/// commutator diagnostic against the period transport t → t + 2π.
inline Report cmd_monodromy(const Problem& problem, const MonodromyOptions& mo, const RunOptions& run = {}) {
  Problem p = detail::with_overrides(problem, run);
  Report r;
  r.body = detail::header("monodromy", p);
  r.body["contour"] = {{"singularity", mo.singularity}, {"radius", mo.radius}, {"steps", mo.steps}};
  r.body["errors"] = json::array();
  if (p.k != 2 || p.darboux_candidates.empty()) {
    r.body["errors"].push_back(error_json(Error(ErrorCode::InvalidArgument, "monodromy requires k = 2 and a Darboux candidate")));
    r.body["status"] = nullptr;
    r.outcome = Outcome::Error;
    return r;
  }
  IntegrationOptions io;
  io.steps = mo.steps;
  HomogeneousPotential V = p.potential();
  json points = json::array();
  bool any_ok = false;
  for (const auto& cand : p.candidates()) {
    json entry;
    entry["candidate"] = to_json(cand);
    json errors = json::array();
    try {
      auto nd = normalize_darboux(V, verify_darboux(V, cand, p.options.tolerance), p.options.tolerance);
      auto chain = build_ve_chain(nd.V, nd.data, 2);
      auto ve1 = monodromy_matrix(linearize_ve(chain[0]).system, mo.singularity, mo.radius, io);
      entry["ve1"] = {{"matrix", matrix_json(ve1.value)},
                      {"determinant", complex_json(ve1.determinant())},
                      {"symplectic_defect", ve1.symplectic_defect()},
                      {"richardson_estimate", ve1.error_estimate}};
      struct Job {
        std::size_t a, g;
      };
      std::vector<Job> jobs;
      for (std::size_t g = 0; g < nd.data.n(); ++g)
        for (std::size_t a = 0; a < nd.data.n(); ++a)
          if (!extract_ve2_alpha(chain, a, g).forcing.empty()) jobs.push_back({a, g});
      double base = std::numbers::pi * static_cast<double>(mo.singularity);
      auto results = parallel_map<json>(jobs.size(), [&](std::size_t i) {
        auto lin = linearize_ve(extract_ve2_alpha(chain, jobs[i].a, jobs[i].g));
        auto m = monodromy_matrix(lin.system, mo.singularity, mo.radius, io);
        cd b = base + mo.radius;
        auto shift = Contour::polyline({b, b + cd(0, 1), b + 2 * std::numbers::pi + cd(0, 1), b + 2 * std::numbers::pi});
        auto t = integrate_system(lin.system, shift, io);
        auto diag = commutator_diagnostic({m.value, t.value}, mo.commutator_tol);
        return json{{"alpha", jobs[i].a + 1},
                    {"gamma", jobs[i].g + 1},
                    {"matrix", matrix_json(m.value)},
                    {"determinant", complex_json(m.determinant())},
                    {"richardson_estimate", m.error_estimate},
                    {"commutator_with_period", {{"max_norm", diag.max_norm}, {"non_commuting", diag.non_commuting}, {"note", diag.note}}}};
      });
      entry["ve2_alpha"] = results;
      any_ok = true;
    } catch (const Error& e) {
      errors.push_back(error_json(e));
    }
    entry["errors"] = errors;
    points.push_back(entry);
  }
  r.body["darboux_points"] = points;
  r.body["status"] = any_ok ? json("Computed") : json(nullptr);
  r.outcome = any_ok ? Outcome::Ok : Outcome::Error;
  return r;
}

// ---------------------------------------------------------------------------
// Text rendering.

inline std::string render_text(const Report& r) {
  std::ostringstream os;
  const json& b = r.body;
  os << "vega " << tool_version << "  " << b.value("command", "") << "\n";
  if (b.contains("problem")) os << "problem: " << b["problem"].value("name", "") << " (n = " << b["problem"]["n"] << ", k = " << b["problem"]["k"] << ")\n";
  if (b.contains("n") && b.value("command", "") == "trig") os << "T_" << b["n"] << " with omega = " << b["omega"].dump() << "\n";
  os << "status: " << (b.contains("status") && !b["status"].is_null() ? b["status"].get<std::string>() : "error") << "\n";
  if (b.contains("darboux_points"))
    for (const auto& pt : b["darboux_points"]) {
      os << "  candidate " << pt["candidate"].dump();
      if (pt.contains("status") && pt["status"].is_string()) os << ": " << pt["status"].get<std::string>();
      os << "\n";
      if (pt.contains("verdict") && !pt["verdict"]["witness"].is_null()) os << "    witness " << pt["verdict"]["witness"].dump() << "\n";
      if (pt.contains("inductive") && pt["inductive"].contains("skipped")) os << "    inductive analysis skipped: " << pt["inductive"]["skipped"]["message"].get<std::string>() << "\n";
      if (pt.contains("regimes"))
        for (const auto& rg : pt["regimes"]) {
          os << "    energy " << rg["energy"].dump() << ": " << rg["homogeneous_basis"].size() << " basis pairs";
          if (rg.contains("numeric_residual_max"))
            os << ", residual " << rg["numeric_residual_max"].dump() << ", certified " << rg["containment_certified"].dump();
          os << "\n";
        }
      if (pt.contains("ve2_alpha"))
        for (const auto& m : pt["ve2_alpha"])
          os << "    VE2(" << m["alpha"] << "," << m["gamma"] << "): commutator " << m["commutator_with_period"]["max_norm"].dump() << "\n";
      for (const auto& e : pt["errors"]) os << "    error " << e["message"].get<std::string>() << "\n";
    }
  if (b.contains("verdict") && b.value("command", "") == "trig") {
    os << "  verdict " << b["verdict"].dump() << "\n";
    os << "  jump difference " << b["jump_at_zero"]["difference"].dump() << "\n";
    for (const auto& n : b["notes"]) os << "  note: " << n.get<std::string>() << "\n";
  }
  for (const auto& e : b["errors"]) os << "error: " << e["message"].get<std::string>() << "\n";
  return os.str();
}

}  // namespace vega
