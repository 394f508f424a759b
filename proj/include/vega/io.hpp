#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vega/balgebra.hpp"
#include "vega/darboux.hpp"
#include "vega/potential.hpp"

namespace vega {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars. Exact values are ["num", "den"] pairs ({"re": .., "im": ..} when
// complex); floats are JSON numbers ({"re": x, "im": y} when complex).

inline json rational_to_json(const Rational& r) {
  return json::array({boost::multiprecision::numerator(r).str(), boost::multiprecision::denominator(r).str()});
}

inline json to_json(const Scalar& s) {
  if (s.is_exact()) {
    if (s.im() == 0) return rational_to_json(s.re());
    return json{{"re", rational_to_json(s.re())}, {"im", rational_to_json(s.im())}};
  }
  auto z = s.to_complex();
  if (z.imag() == 0) return z.real();
  return json{{"re", z.real()}, {"im", z.imag()}};
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  fail(ErrorCode::ParseError, "at " + (where.empty() ? std::string("/") : where) + ": " + what);
}

inline Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_unsigned()) return Rational(BigInt(j.get<unsigned long long>()));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      parse_fail(where, e.what());
    }
  }
  if (j.is_array() && j.size() == 2) {
    Rational num = rational_from_json(j[0], where + "/0");
    Rational den = rational_from_json(j[1], where + "/1");
    if (den == 0) parse_fail(where, "zero denominator");
    return num / den;
  }
  parse_fail(where, "expected an exact number (integer, \"p/q\" or [\"p\", \"q\"])");
}

}  // namespace detail

inline Scalar scalar_from_json(const json& j, const std::string& where = "") {
  if (j.is_number_float()) return Scalar::from_double(j.get<double>());
  if (j.is_object()) {
    if (!j.contains("re") || !j.contains("im") || j.size() != 2) detail::parse_fail(where, "complex numbers need exactly 're' and 'im'");
    const json& re = j["re"];
    const json& im = j["im"];
    if (re.is_number_float() || im.is_number_float()) {
      auto part = [&](const json& x, const char* name) {
        if (!x.is_number()) detail::parse_fail(where + "/" + name, "expected a number");
        return x.get<double>();
      };
      return Scalar::from_complex({part(re, "re"), part(im, "im")});
    }
    return Scalar(detail::rational_from_json(re, where + "/re"), detail::rational_from_json(im, where + "/im"));
  }
  return Scalar(detail::rational_from_json(j, where));
}

inline json to_json(const MultiIndex& m) { return json(m.exponents()); }

inline json to_json(const std::vector<Scalar>& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(to_json(s));
  return out;
}

/// Terms in graded-lex order: [{"exponents": [...], "coefficient": c}, ...].
inline json to_json(const Poly& p) {
  json out = json::array();
  for (const auto& [m, c] : p.terms()) out.push_back({{"exponents", to_json(m)}, {"coefficient", to_json(c)}});
  return out;
}

inline Poly poly_from_json(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array()) detail::parse_fail(where, "expected a list of terms");
  Poly p(n);
  for (std::size_t t = 0; t < j.size(); ++t) {
    std::string at = where + "/" + std::to_string(t);
    const json& term = j[t];
    if (!term.is_object() || !term.contains("exponents") || !term.contains("coefficient"))
      detail::parse_fail(at, "a term needs 'exponents' and 'coefficient'");
    const json& e = term["exponents"];
    if (!e.is_array() || e.size() != n)
      detail::parse_fail(at + "/exponents", "expected " + std::to_string(n) + " exponents");
    std::vector<unsigned> ex;
    for (std::size_t i = 0; i < n; ++i) {
      if (!e[i].is_number_integer() || e[i].get<long long>() < 0)
        detail::parse_fail(at + "/exponents/" + std::to_string(i), "exponents must be non-negative integers");
      ex.push_back(static_cast<unsigned>(e[i].get<long long>()));
    }
    p = p + Poly::monomial(MultiIndex(ex), scalar_from_json(term["coefficient"], at + "/coefficient"));
  }
  return p;
}

inline json to_json(const BElement& b) {
  json out = json::array();
  for (const auto& [key, c] : b.terms())
    out.push_back({{"log_power", key.m}, {"omega", to_json(key.omega)}, {"coefficient", to_json(c)}});
  return out;
}

inline BElement belement_from_json(const json& j, const EnergyRegime& r, const std::string& where = "") {
  if (!j.is_array()) detail::parse_fail(where, "expected a list of terms");
  BElement b(r);
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string at = where + "/" + std::to_string(i);
    if (!j[i].contains("log_power") || !j[i].contains("omega") || !j[i].contains("coefficient"))
      detail::parse_fail(at, "a term needs 'log_power', 'omega' and 'coefficient'");
    b.add(j[i]["log_power"].get<unsigned>(), scalar_from_json(j[i]["omega"], at + "/omega"),
          scalar_from_json(j[i]["coefficient"], at + "/coefficient"));
  }
  return b;
}

inline json to_json(const EnergyRegime& r) { return r.zero ? json(rational_to_json(0)) : to_json(r.e); }

inline EnergyRegime regime_from_scalar(const Scalar& e) {
  return e.is_zero() ? EnergyRegime::zero_energy() : EnergyRegime::nonzero(e);
}

// ---------------------------------------------------------------------------
// Problem files.

struct ProblemOptions {
  bool exact = true;
  double tolerance = default_tolerance;
  unsigned p_max = 3;
  std::vector<Scalar> energies{Scalar(0)};
  bool assert_independence = false;
  unsigned seed = 1;
};

struct Problem {
  std::string name;
  std::size_t n = 0;
  int k = 0;
  Poly numerator;
  Poly denominator;
  std::vector<Point> darboux_candidates;
  ProblemOptions options;

  /// The potential in the arithmetic mode of the options.
  HomogeneousPotential potential() const {
    HomogeneousPotential V(n, k, numerator, denominator);
    return options.exact ? V : V.to_float();
  }
  std::vector<Point> candidates() const {
    if (options.exact) return darboux_candidates;
    std::vector<Point> out;
    for (const auto& d : darboux_candidates) {
      Point f;
      for (const auto& x : d) f.push_back(x.to_float());
      out.push_back(f);
    }
    return out;
  }
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

/// Euler's identity at a few rational points, skipping poles.
inline void check_homogeneity(const HomogeneousPotential& V) {
  if (!V.degree_consistent()) fail(ErrorCode::InvalidPotential, "potential is not homogeneous of the declared degree");
  std::size_t n = V.n(), checked = 0;
  for (int shift = 0; shift < 8 && checked < 3; ++shift) {
    Point q;
    for (std::size_t i = 0; i < n; ++i) q.push_back(Scalar(Rational(static_cast<long long>(i + 2 + shift), static_cast<long long>(2 * i + 3))));
    try {
      if (!euler_check(V, {q})) fail(ErrorCode::InvalidPotential, "Euler identity fails");
      ++checked;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DivisionByZero && e.code() != ErrorCode::PoleAtPoint) throw;
    }
  }
}

}  // namespace detail

inline Problem problem_from_json(const json& j) {
  if (!j.is_object()) detail::parse_fail("", "a problem is a JSON object");
  Problem p;
  for (const char* key : {"n", "k", "potential"})
    if (!j.contains(key)) detail::parse_fail("", std::string("missing field '") + key + "'");
  for (const auto& [key, v] : j.items())
    if (key != "name" && key != "n" && key != "k" && key != "potential" && key != "darboux_candidates" && key != "options")
      detail::parse_fail("/" + key, "unknown field");
  if (j.contains("name")) {
    if (!j["name"].is_string()) detail::parse_fail("/name", "expected a string");
    p.name = j["name"].get<std::string>();
  }
  if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) detail::parse_fail("/n", "expected a positive integer");
  if (!j["k"].is_number_integer()) detail::parse_fail("/k", "expected an integer");
  p.n = j["n"].get<std::size_t>();
  p.k = j["k"].get<int>();
  const json& pot = j["potential"];
  if (!pot.is_object() || !pot.contains("numerator")) detail::parse_fail("/potential", "expected {'numerator': [...], 'denominator': [...]}");
  p.numerator = poly_from_json(pot["numerator"], p.n, "/potential/numerator");
  p.denominator = pot.contains("denominator") ? poly_from_json(pot["denominator"], p.n, "/potential/denominator")
                                              : Poly::constant(p.n, Scalar(1));
  if (p.denominator.is_zero()) detail::parse_fail("/potential/denominator", "denominator is zero");
  if (j.contains("darboux_candidates")) {
    const json& dc = j["darboux_candidates"];
    if (!dc.is_array()) detail::parse_fail("/darboux_candidates", "expected a list of vectors");
    for (std::size_t i = 0; i < dc.size(); ++i) {
      std::string at = "/darboux_candidates/" + std::to_string(i);
      if (!dc[i].is_array() || dc[i].size() != p.n) detail::parse_fail(at, "expected " + std::to_string(p.n) + " coordinates");
      Point d;
      for (std::size_t c = 0; c < p.n; ++c) d.push_back(scalar_from_json(dc[i][c], at + "/" + std::to_string(c)));
      p.darboux_candidates.push_back(d);
    }
  }
  if (j.contains("options")) {
    const json& o = j["options"];
    if (!o.is_object()) detail::parse_fail("/options", "expected an object");
    for (const auto& [key, v] : o.items()) {
      std::string at = "/options/" + key;
      if (key == "mode") {
        if (v != "exact" && v != "float") detail::parse_fail(at, "mode is 'exact' or 'float'");
        p.options.exact = v == "exact";
      } else if (key == "tolerance") {
        if (!v.is_number() || v.get<double>() < 0) detail::parse_fail(at, "expected a non-negative number");
        p.options.tolerance = v.get<double>();
      } else if (key == "p_max") {
        if (!v.is_number_integer() || v.get<long long>() < 1) detail::parse_fail(at, "expected a positive integer");
        p.options.p_max = v.get<unsigned>();
      } else if (key == "energy") {
        p.options.energies = {scalar_from_json(v, at)};
      } else if (key == "energies") {
        if (!v.is_array() || v.empty()) detail::parse_fail(at, "expected a non-empty list of energies");
        p.options.energies.clear();
        for (std::size_t i = 0; i < v.size(); ++i) p.options.energies.push_back(scalar_from_json(v[i], at + "/" + std::to_string(i)));
      } else if (key == "assert_independence") {
        if (!v.is_boolean()) detail::parse_fail(at, "expected true or false");
        p.options.assert_independence = v.get<bool>();
      } else if (key == "seed") {
        if (!v.is_number_integer() || v.get<long long>() < 0) detail::parse_fail(at, "expected a non-negative integer");
        p.options.seed = v.get<unsigned>();
      } else {
        detail::parse_fail(at, "unknown option");
      }
    }
  }
  detail::check_homogeneity(HomogeneousPotential(p.n, p.k, p.numerator, p.denominator));
  return p;
}

inline Problem parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, detail::line_column(text, e.byte) + ": malformed JSON");
  }
  return problem_from_json(j);
}

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

inline json to_json(const Problem& p) {
  json j;
  j["name"] = p.name;
  j["n"] = p.n;
  j["k"] = p.k;
  j["potential"] = {{"numerator", to_json(p.numerator)}, {"denominator", to_json(p.denominator)}};
  json dc = json::array();
  for (const auto& d : p.darboux_candidates) dc.push_back(to_json(d));
  j["darboux_candidates"] = dc;
  json energies = json::array();
  for (const auto& e : p.options.energies) energies.push_back(to_json(e));
  j["options"] = {{"mode", p.options.exact ? "exact" : "float"},
                  {"tolerance", p.options.tolerance},
                  {"p_max", p.options.p_max},
                  {"energies", energies},
                  {"assert_independence", p.options.assert_independence},
                  {"seed", p.options.seed}};
  return j;
}

}  // namespace vega
