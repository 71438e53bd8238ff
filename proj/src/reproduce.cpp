#include "idde/reproduce.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "idde/criteria.hpp"
#include "idde/errors.hpp"
#include "idde/integrator.hpp"
#include "idde/scenarios.hpp"
#include "idde/wazewska.hpp"

namespace idde {

namespace {

constexpr double kStep = 1e-3;
constexpr double kFinderTol = 1e-10;
constexpr int kHorizon = 200;
constexpr double kAttractTol = 1e-6;
const std::vector<double> kScales = {0.1, 0.5, 2.0, 10.0};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Run {
  int density = 4096;
  json configs = json::array();
  json report = json::object();
  std::string trajectory;
  std::string attractivity = "scale,period,e_m\n";
  std::vector<std::pair<bool, std::string>> checks;

  Scenario load(const std::string& id) {
    json doc = bundled(id).doc;
    doc["grid_density"] = density;
    configs.push_back(doc);
    return scenario_from_json(doc);
  }
  void check(bool ok, const std::string& what) { checks.emplace_back(ok, what); }
};

VerifyOptions verify_options() {
  VerifyOptions o;
  o.scales = kScales;
  o.horizon_periods = kHorizon;
  o.tol = kAttractTol;
  o.step = {kStep};
  return o;
}

std::string scale_list() {
  std::string s;
  for (double v : kScales) s += (s.empty() ? "" : ",") + fmt(v);
  return s;
}

const CriterionResult& need(const std::vector<CriterionResult>& r, CriterionId id) {
  const CriterionResult* p = find(r, id);
  if (!p) throw NumericError("missing criterion " + to_string(id));
  return *p;
}

void example_2_22(Run& run) {
  const Scenario s = run.load("example-2-22");
  const Trajectory x = integrate(s, {kStep}, 50.0);
  double worst = 0.0;
  for (int i = 0; i <= 5000; ++i) {
    const double t = 50.0 * i / 5000;
    const double exact = std::exp(1.0 / (t + 1.0));
    worst = std::max(worst, std::abs(x.eval(t) - exact) / exact);
  }
  const double end = x.eval(50.0);
  run.trajectory = trajectory_csv(x);

  AlphaOptions ao;
  ao.horizon = 50.0;
  const auto criteria = check_zero_criteria(s, ao);
  const bool established = attractivity_established(criteria);

  VerifyOptions vo = verify_options();
  vo.scales = {1.0, 2.0};
  vo.horizon_periods = 50;
  const AttractivityReport att = verify_attractivity(s, nullptr, 1.0, vo);
  run.attractivity = attractivity_csv(att);

  run.report = {{"case", "example-2-22"},
                {"criteria", report_to_json(criteria)},
                {"zero_attractivity", established},
                {"exact_solution_max_relative_error", worst},
                {"x_end", end},
                {"attractivity", to_json(att)}};
  run.check(worst < 1e-6, "exact solution exp(1/(t+1)) matched on [0, 50], max relative error " + fmt(worst));
  run.check(end >= 0.99, "x(50) = " + fmt(end) + " >= 0.99 c");
  run.check(!established, "no criterion establishes attractivity of zero (zero-attractivity=false)");
  run.check(!att.attracting(), "simulated solutions stay away from zero");
}

void wazewska_case(Run& run, const std::string& id, CriterionId headline) {
  const Scenario s = run.load(id);
  const WazewskaModel model(s);
  FinderOptions fo;
  fo.tol = kFinderTol;
  fo.step = {kStep};
  const PeriodicSolution sol = find_periodic(model, fo);
  run.trajectory = trajectory_csv(sol.nstar.period());
  const auto criteria = check_wazewska_criteria(s, sol.nstar);
  const AttractivityReport att = verify_attractivity(model, sol.nstar, verify_options());
  run.attractivity = attractivity_csv(att);
  run.report = {{"case", id},
                {"periodic_solution", to_json(sol)},
                {"criteria", report_to_json(criteria)},
                {"attractivity_established", attractivity_established(criteria)},
                {"attractivity", to_json(att)}};
  const CriterionResult& h = need(criteria, headline);
  run.check(sol.periodicity_residual < 1e-8, "periodic solution residual " + fmt(sol.periodicity_residual));
  run.check(h.established(), to_string(headline) + " " + to_string(h.verdict) +
                                 (h.hypotheses_met ? "" : " (hypotheses not met)"));
  run.check(att.attracting(), "attracting for scales " + scale_list() + " within " + std::to_string(kHorizon) +
                                  " periods (tol " + fmt(kAttractTol) + ")");
  if (id == "graef-compare") {
    const double cor = h.value("value");
    const double sigma = h.value("graef_sigma");
    run.report["comparison"] = {{"cor3_2_value", cor},
                                {"graef_sigma", sigma},
                                {"smaller", cor < sigma ? "cor3_2" : "graef_sigma"}};
    run.check(true, "COR3_2 value " + fmt(cor) + " vs sigma " + fmt(sigma) + ": smaller is " +
                        (cor < sigma ? "COR3_2" : "sigma"));
  }
}

void boundary_alpha(Run& run) {
  const Scenario below = run.load("boundary-alpha-below");
  const Scenario above = run.load("boundary-alpha-above");
  const auto rb = check_zero_criteria(below);
  const auto ra = check_zero_criteria(above);
  const CriterionResult& hb = need(rb, CriterionId::H5);
  const CriterionResult& ha = need(ra, CriterionId::H5);
  run.trajectory = trajectory_csv(integrate(below, {kStep}, 20.0));
  const AttractivityReport att = verify_attractivity(below, nullptr, 1.0, verify_options());
  run.attractivity = attractivity_csv(att);
  run.report = {{"case", "boundary-alpha"},
                {"below", {{"criteria", report_to_json(rb)}, {"attractivity", to_json(att)}}},
                {"above", {{"criteria", report_to_json(ra)}}}};
  run.check(hb.established(), "below: alpha1*alpha2 = " + fmt(hb.value("alpha1_alpha2")) + " " + to_string(hb.verdict));
  run.check(att.attracting(), "below: attracting for scales " + scale_list() + " within " + std::to_string(kHorizon) +
                                  " periods (tol " + fmt(kAttractTol) + ")");
  run.check(ha.verdict == Verdict::fail, "above: alpha1*alpha2 = " + fmt(ha.value("alpha1_alpha2")) + " " +
                                             to_string(ha.verdict));
}

}  // namespace

const std::vector<std::string>& reproduce_cases() {
  static const std::vector<std::string> ids = {"example-2-22", "liu-takeuchi", "graef-compare", "boundary-alpha"};
  return ids;
}

ReproduceResult reproduce(const std::string& case_id, const std::string& out_dir, std::optional<int> grid_density) {
  Run run;
  run.density = grid_density.value_or(default_grid_density());
  if (case_id == "example-2-22") {
    example_2_22(run);
  } else if (case_id == "liu-takeuchi") {
    wazewska_case(run, case_id, CriterionId::THM3_4);
  } else if (case_id == "graef-compare") {
    wazewska_case(run, case_id, CriterionId::COR3_2);
  } else if (case_id == "boundary-alpha") {
    boundary_alpha(run);
  } else {
    throw ConfigError("case", "unknown case '" + case_id + "'");
  }

  ReproduceResult res;
  res.passed = true;
  std::string summary = "case: " + case_id + "\n";
  for (const auto& [ok, what] : run.checks) {
    summary += std::string(ok ? "PASS  " : "FAIL  ") + what + "\n";
    res.passed = res.passed && ok;
  }
  summary += std::string("result: ") + (res.passed ? "PASS" : "FAIL") + "\n";
  res.summary = summary;

  res.manifest.subcommand = "reproduce";
  res.manifest.config = run.configs;
  res.manifest.settings = {{"case", case_id},
                           {"grid_density", run.density},
                           {"step", kStep},
                           {"finder_tol", kFinderTol},
                           {"scales", kScales},
                           {"horizon_periods", kHorizon},
                           {"attractivity_tol", kAttractTol},
                           {"verdict_band", kVerdictBand},
                           {"alpha_grid_points", AlphaOptions{}.grid_points}};
  res.manifest.outputs = {"trajectory.csv", "report.json", "attractivity.csv", "summary.txt", "manifest.json"};

  const std::filesystem::path dir(out_dir);
  write_file((dir / "trajectory.csv").string(), run.trajectory);
  write_file((dir / "report.json").string(), dump_json(run.report));
  write_file((dir / "attractivity.csv").string(), run.attractivity);
  write_file((dir / "summary.txt").string(), summary);
  write_file((dir / "manifest.json").string(), dump_json(to_json(res.manifest)));
  return res;
}

}  // namespace idde
