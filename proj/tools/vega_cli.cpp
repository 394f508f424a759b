#include <iostream>

#include <CLI11.hpp>

#include "vega/pipelines.hpp"

namespace {

struct Common {
  std::string problem_file;
  std::optional<unsigned> order;
  std::string mode;
  std::optional<double> tol;
  std::vector<std::string> energies;
  bool assert_independence = false;
  std::optional<unsigned> seed;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("problem", c.problem_file, "problem file (JSON)")->required()->check(CLI::ExistingFile);
  app->add_option("--order", c.order, "highest variational order p_max")->check(CLI::PositiveNumber);
  app->add_option("--mode", c.mode, "arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
  app->add_option("--tol", c.tol, "tolerance for float mode")->check(CLI::NonNegativeNumber);
  app->add_option("--energy", c.energies, "energy e (repeatable; 0 selects the zero-energy regime)");
  app->add_flag("--assert-independence", c.assert_independence, "assume the frequencies are Z-linearly independent");
  app->add_option("--seed", c.seed, "seed for the randomized cofactor choices");
}

vega::RunOptions run_options(const Common& c) {
  vega::RunOptions r;
  r.p_max = c.order;
  if (!c.mode.empty()) r.exact = c.mode == "exact";
  r.tolerance = c.tol;
  if (c.assert_independence) r.assert_independence = true;
  for (const auto& e : c.energies) r.energies.push_back(vega::Scalar(vega::detail::parse_rational(e)));
  r.seed = c.seed;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational equations and integrability checks for homogeneous potentials"};
  app.set_version_flag("--version", vega::tool_version);
  app.require_subcommand(1);
  std::string report_format = "json";
  app.add_option("--report", report_format, "report format")->check(CLI::IsMember({"json", "text"}));

  Common analyze_opts, km2_opts, mono_opts;
  auto* analyze = app.add_subcommand("analyze", "degree 2: VE_2 verdict and higher-order certificate");
  add_common(analyze, analyze_opts);
  auto* km2 = app.add_subcommand("km2", "degree -2: closed-form solutions of VE_1 .. VE_p");
  add_common(km2, km2_opts);

  auto* trig = app.add_subcommand("trig", "meromorphy of the integral of exp(i omega t) / sin^n t");
  unsigned trig_n = 1;
  std::string trig_omega = "0";
  trig->add_option("--n", trig_n, "power of sin t")->required()->check(CLI::PositiveNumber);
  trig->add_option("--omega", trig_omega, "omega as p/q or sqrt(p/q)");
  std::optional<double> trig_tol;
  trig->add_option("--tol", trig_tol, "tolerance for non-exact omega");

  auto* mono = app.add_subcommand("monodromy", "degree 2: numeric monodromy of VE_1 and VE_2 around n pi");
  add_common(mono, mono_opts);
  vega::MonodromyOptions mo;
  mono->add_option("--singularity", mo.singularity, "index n of the singularity t = n pi");
  mono->add_option("--radius", mo.radius, "circle radius, in (0, pi)");
  mono->add_option("--steps", mo.steps, "RK4 steps per loop");

  for (auto* sub : {analyze, km2, trig, mono}) sub->add_option("--report", report_format, "report format")->check(CLI::IsMember({"json", "text"}));

  CLI11_PARSE(app, argc, argv);

  vega::Report report;
  try {
    if (*analyze) {
      report = vega::cmd_analyze(vega::load_problem(analyze_opts.problem_file), run_options(analyze_opts));
    } else if (*km2) {
      report = vega::cmd_km2(vega::load_problem(km2_opts.problem_file), run_options(km2_opts));
    } else if (*trig) {
      report = vega::cmd_trig(trig_n, vega::parse_omega(trig_omega), trig_tol.value_or(vega::default_tolerance));
    } else {
      report = vega::cmd_monodromy(vega::load_problem(mono_opts.problem_file), mo, run_options(mono_opts));
    }
  } catch (const vega::Error& e) {
    std::cerr << "vega: " << e.what() << "\n";
    report.body = {{"tool", {{"name", "vega"}, {"version", vega::tool_version}}},
                   {"command", app.get_subcommands().front()->get_name()},
                   {"errors", nlohmann::json::array({vega::error_json(e)})},
                   {"status", nullptr}};
    report.outcome = vega::Outcome::Error;
  }
  for (const auto& pt : report.body.value("darboux_points", nlohmann::json::array()))
    for (const auto& e : pt["errors"]) std::cerr << "vega: candidate " << pt["candidate"].dump() << ": " << e["message"].get<std::string>() << "\n";
  std::cout << (report_format == "text" ? vega::render_text(report) : vega::render_json(report));
  return report.exit_code();
}
