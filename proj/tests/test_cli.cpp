#include <gtest/gtest.h>

#include <cstdlib>

#include "potentials.hpp"
#include "vega/pipelines.hpp"

using namespace vega;
using vega::testing::q;

namespace {

std::string problem_path(const std::string& name) { return std::string(VEGA_PROBLEMS_DIR) + "/" + name + ".json"; }

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

const char* cubic_text = R"({
  "n": 2, "k": 2,
  "potential": {
    "numerator": [
      {"exponents": [2, 1], "coefficient": 1},
      {"exponents": [0, 3], "coefficient": "1/2"},
      {"exponents": [3, 0], "coefficient": 1}
    ],
    "denominator": [{"exponents": [0, 1], "coefficient": 1}]
  },
  "darboux_candidates": [[0, 1]]
})";

}  // namespace

TEST(Scalars, RoundTrip) {
  for (const Scalar& s : {q(3, 4), q(-7), Scalar(q(1, 3).re(), Rational(-2, 5)), Scalar::from_double(0.125),
                          Scalar::from_complex({1.5, -2.0})}) {
    json j = to_json(s);
    Scalar back = scalar_from_json(j);
    EXPECT_EQ(back.is_exact(), s.is_exact());
    EXPECT_EQ(to_json(back), j);
    EXPECT_TRUE((back - s).is_zero());
  }
  EXPECT_EQ(to_json(q(3, 4)), json::array({"3", "4"}));
}

TEST(Scalars, AcceptedExactForms) {
  EXPECT_TRUE((scalar_from_json(json(3)) - q(3)).is_zero());
  EXPECT_TRUE((scalar_from_json(json("3/4")) - q(3, 4)).is_zero());
  EXPECT_TRUE((scalar_from_json(json::array({"-6", "8"})) - q(-3, 4)).is_zero());
  EXPECT_EQ(code_of([] { scalar_from_json(json::array({"1", "0"}), "/x"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { scalar_from_json(json("one"), "/x"); }), ErrorCode::ParseError);
}

TEST(Problems, ParsesAndRoundTrips) {
  Problem p = parse_problem(cubic_text);
  EXPECT_EQ(p.n, 2u);
  EXPECT_EQ(p.k, 2);
  EXPECT_EQ(p.darboux_candidates.size(), 1u);
  EXPECT_EQ(p.options.p_max, 3u);
  Problem back = problem_from_json(to_json(p));
  EXPECT_EQ(to_json(back), to_json(p));
  for (const char* name : {"oscillator3", "cubic", "km2_radial", "km2_jordan"}) {
    Problem f = load_problem(problem_path(name));
    EXPECT_EQ(to_json(problem_from_json(to_json(f))), to_json(f)) << name;
  }
}

TEST(Problems, MalformedExponentVectorHasFieldLocus) {
  json j = json::parse(cubic_text);
  j["potential"]["numerator"][1]["exponents"] = json::array({0, 3, 1});
  std::string msg;
  EXPECT_EQ(code_of([&] { problem_from_json(j); }, &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("/potential/numerator/1/exponents"), std::string::npos) << msg;
  j["potential"]["numerator"][1]["exponents"] = json::array({0, -3});
  EXPECT_EQ(code_of([&] { problem_from_json(j); }, &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("/potential/numerator/1/exponents/1"), std::string::npos) << msg;
}

TEST(Problems, SyntaxErrorHasLineAndColumn) {
  std::string text = "{\n  \"n\": 2,\n  \"k\": 2,,\n}";
  std::string msg;
  EXPECT_EQ(code_of([&] { parse_problem(text); }, &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Problems, RejectsUnknownFieldsAndInhomogeneousPotentials) {
  json j = json::parse(cubic_text);
  j["extra"] = 1;
  EXPECT_EQ(code_of([&] { problem_from_json(j); }), ErrorCode::ParseError);
  j.erase("extra");
  j["options"] = {{"order", 3}};
  EXPECT_EQ(code_of([&] { problem_from_json(j); }), ErrorCode::ParseError);
  j.erase("options");
  j["potential"]["numerator"].push_back({{"exponents", {1, 0}}, {"coefficient", 1}});
  EXPECT_EQ(code_of([&] { problem_from_json(j); }), ErrorCode::InvalidPotential);
  j = json::parse(cubic_text);
  j["k"] = 3;
  EXPECT_EQ(code_of([&] { problem_from_json(j); }), ErrorCode::InvalidPotential);
}

TEST(Analyze, CubicObstruction) {
  Report r = cmd_analyze(load_problem(problem_path("cubic")));
  EXPECT_EQ(r.exit_code(), 2);
  EXPECT_EQ(r.body["status"], "NotVirtuallyAbelian");
  const json& w = r.body["darboux_points"][0]["verdict"]["witness"];
  EXPECT_EQ(w["alpha"], 1);
  EXPECT_EQ(w["gamma"], 1);
  EXPECT_TRUE((scalar_from_json(w["coefficient"]) - q(-6)).is_zero());
  EXPECT_EQ(w["tags"][0], "Irrational");
  EXPECT_EQ(r.body["darboux_points"][0]["theta"].size(), 1u);
}

TEST(Analyze, OscillatorCertificate) {
  Report r = cmd_analyze(load_problem(problem_path("oscillator3")));
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.body["status"], "VirtuallyAbelian");
  const json& cert = r.body["darboux_points"][0]["inductive"]["certificate"];
  EXPECT_EQ(cert["p_max"], 5);
  EXPECT_EQ(cert["xi_tables"].size(), 4u);
  for (const auto& table : cert["xi_tables"])
    for (const auto& comp : table["components"])
      for (const auto& e : comp["entries"]) EXPECT_TRUE(scalar_from_json(e["value"]).is_zero());
}

TEST(Analyze, InductiveStepSkippedWithoutIndependence) {
  RunOptions run;
  run.assert_independence = false;
  Report r = cmd_analyze(load_problem(problem_path("oscillator3")), run);
  const json& pt = r.body["darboux_points"][0];
  EXPECT_EQ(pt["verdict"]["status"], "VirtuallyAbelian");
  EXPECT_TRUE(pt["inductive"].contains("skipped"));
}

TEST(Analyze, ErrorsAreStructured) {
  json j = json::parse(cubic_text);
  j["darboux_candidates"] = json::array({json::array({1, 1})});
  Report r = cmd_analyze(problem_from_json(j));
  EXPECT_EQ(r.exit_code(), 1);
  EXPECT_EQ(r.body["darboux_points"][0]["errors"][0]["code"], "NotADarbouxPoint");
  Report wrong_k = cmd_analyze(load_problem(problem_path("km2_radial")));
  EXPECT_EQ(wrong_k.exit_code(), 1);
  EXPECT_EQ(wrong_k.body["errors"][0]["code"], "InvalidArgument");
}

TEST(Analyze, StructuresRoundTrip) {
  Report r = cmd_analyze(load_problem(problem_path("cubic")));
  const json& v = r.body["darboux_points"][0]["verdict"];
  EXPECT_EQ(to_json(verdict_from_json(v)), v);
  Report o = cmd_analyze(load_problem(problem_path("oscillator3")));
  const json& c = o.body["darboux_points"][0]["inductive"]["certificate"];
  EXPECT_EQ(to_json(certificate_from_json(c)), c);
  Report reparsed{json::parse(render_json(r)), r.outcome};
  EXPECT_EQ(render_json(reparsed), render_json(r));
}

TEST(Km2, RadialBothRegimesCertified) {
  Report r = cmd_km2(load_problem(problem_path("km2_radial")));
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.body["status"], "Certified");
  const json& regimes = r.body["darboux_points"][0]["regimes"];
  ASSERT_EQ(regimes.size(), 2u);
  for (const auto& rg : regimes) {
    EXPECT_TRUE(rg["all_symbolic_residuals_zero"].get<bool>());
    EXPECT_LT(rg["numeric_residual_max"].get<double>(), 1e-8);
    EXPECT_EQ(rg["orders"].size(), 3u);
  }
}

TEST(Km2, JordanCertified) {
  Report r = cmd_km2(load_problem(problem_path("km2_jordan")));
  EXPECT_EQ(r.exit_code(), 0) << r.body.dump(2);
  EXPECT_FALSE(r.body["darboux_points"][0]["darboux"]["diagonalizable"].get<bool>());
}

TEST(Km2, FirstOrderGivesBasisOnly) {
  RunOptions run;
  run.p_max = 1;
  Report r = cmd_km2(load_problem(problem_path("km2_radial")), run);
  const json& rg = r.body["darboux_points"][0]["regimes"][0];
  EXPECT_EQ(rg["homogeneous_basis"].size(), 2u);
  EXPECT_FALSE(rg.contains("orders"));
}

TEST(Trig, Examples) {
  Report r20 = cmd_trig(2, q(0));
  EXPECT_EQ(r20.exit_code(), 0);
  EXPECT_EQ(r20.body["notes"][0], "T_2^(0) = -cot t");
  Report r15 = cmd_trig(1, q(5));
  EXPECT_EQ(r15.exit_code(), 2);
  EXPECT_LT(r15.body["jump_at_zero"]["difference"].get<double>(), 1e-6);
  Report r64 = cmd_trig(6, q(4));
  EXPECT_EQ(r64.exit_code(), 0);
  EXPECT_TRUE((scalar_from_json(r64.body["reduction"]["p_product"])).is_zero());
  EXPECT_TRUE((parse_omega("sqrt(2)") * parse_omega("sqrt(2)") - q(2)).abs() < 1e-12);
  EXPECT_TRUE((parse_omega("-3/2") - q(-3, 2)).is_zero());
}

TEST(Monodromy, CubicReport) {
  MonodromyOptions mo;
  Report r = cmd_monodromy(load_problem(problem_path("cubic")), mo);
  EXPECT_EQ(r.exit_code(), 0);
  const json& pt = r.body["darboux_points"][0];
  EXPECT_NEAR(pt["ve1"]["determinant"]["re"].get<double>(), 1.0, 1e-8);
  ASSERT_EQ(pt["ve2_alpha"].size(), 1u);
  EXPECT_TRUE(pt["ve2_alpha"][0]["commutator_with_period"]["non_commuting"].get<bool>());
}

TEST(Reports, DeterministicAcrossThreadCounts) {
  auto run_all = [] {
    std::string out;
    out += render_json(cmd_analyze(load_problem(problem_path("cubic"))));
    out += render_json(cmd_km2(load_problem(problem_path("km2_radial"))));
    out += render_json(cmd_trig(4, q(2)));
    return out;
  };
  setenv("VEGA_THREADS", "1", 1);
  std::string a = run_all();
  setenv("VEGA_THREADS", "8", 1);
  std::string b = run_all();
  unsetenv("VEGA_THREADS");
  EXPECT_EQ(a, b);
  EXPECT_EQ(run_all(), a);
}

TEST(Reports, TextRendering) {
  std::string text = render_text(cmd_analyze(load_problem(problem_path("cubic"))));
  EXPECT_NE(text.find("status: NotVirtuallyAbelian"), std::string::npos) << text;
  EXPECT_NE(render_text(cmd_trig(2, q(0))).find("-cot t"), std::string::npos);
}
