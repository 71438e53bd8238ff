#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "idde/config.hpp"
#include "idde/criteria.hpp"
#include "idde/errors.hpp"
#include "idde/integrator.hpp"
#include "idde/output.hpp"
#include "idde/reproduce.hpp"
#include "idde/scenarios.hpp"
#include "idde/wazewska.hpp"

namespace fs = std::filesystem;
using namespace idde;

namespace {

constexpr int kOk = 0;
constexpr int kAcceptance = 1;
constexpr int kConfig = 2;
constexpr int kNumeric = 3;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

// Scenario document from --config or --scenario, with the grid density resolved.
json scenario_doc(const std::string& config, const std::string& bundled_id) {
  if (config.empty() == bundled_id.empty()) throw ConfigError("--config", "give exactly one of --config or --scenario");
  json doc = config.empty() ? bundled(bundled_id).doc : read_json(config);
  if (!doc.is_object()) throw ConfigError("$", "scenario must be a JSON object");
  if (!doc.contains("grid_density")) doc["grid_density"] = default_grid_density();
  return doc;
}

// Accepts either a find-periodic report or a bare periodic trajectory.
json nstar_doc(const std::string& path) {
  json j = read_json(path);
  return j.contains("nstar") ? j["nstar"] : j;
}

std::string name_of(const std::string& path) { return fs::path(path).filename().string(); }
std::string dir_of(const std::string& path) {
  const fs::path p = fs::path(path).parent_path();
  return p.empty() ? "." : p.string();
}
std::string in_dir(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string strip_ext(const std::string& name) { return fs::path(name).replace_extension().string(); }

void write_manifest(const RunManifest& m, const std::string& path) { write_file(path, dump_json(to_json(m))); }

// ---- executors: every output is derived from the manifest alone ----

int run_simulate(const RunManifest& m, const std::string& dir) {
  const Scenario s = scenario_from_json(m.config);
  const Trajectory x = integrate(s, {m.settings.at("step").get<double>()}, m.settings.at("t_end").get<double>());
  write_file(in_dir(dir, m.settings.at("trajectory_file").get<std::string>()), trajectory_csv(x));
  if (m.settings.contains("plot_file")) {
    write_file(in_dir(dir, m.settings.at("plot_file").get<std::string>()), plotdata(x));
  }
  std::cout << "simulated to t = " << format_double(x.t_end()) << ", x = " << format_double(x.end_value()) << "\n";
  return kOk;
}

PeriodicSolution solve_periodic(const WazewskaModel& model, const json& settings) {
  FinderOptions fo;
  fo.tol = settings.at("tol").get<double>();
  fo.max_periods = settings.at("max_periods").get<int>();
  if (!settings.at("n0").is_null()) fo.n0 = settings.at("n0").get<double>();
  fo.step = {settings.at("step").get<double>()};
  return find_periodic(model, fo);
}

int run_find_periodic(const RunManifest& m, const std::string& dir) {
  const Scenario s = scenario_from_json(m.config);
  const WazewskaModel model(s);
  const PeriodicSolution sol = solve_periodic(model, m.settings);
  write_file(in_dir(dir, m.settings.at("trajectory_file").get<std::string>()), trajectory_csv(sol.nstar.period()));
  write_file(in_dir(dir, m.settings.at("report_file").get<std::string>()), dump_json(to_json(sol)));
  std::cout << "periodic solution after " << sol.periods << " periods, residual "
            << format_double(sol.periodicity_residual) << ", range [" << format_double(sol.nstar.min_value()) << ", "
            << format_double(sol.nstar.max_value()) << "]\n";
  return kOk;
}

int run_check(const RunManifest& m, const std::string& dir) {
  const Scenario s = scenario_from_json(m.config);
  AlphaOptions ao;
  ao.horizon = m.settings.at("horizon").get<double>();
  ao.alt_lambda2 = m.settings.at("alt_lambda2").get<bool>();
  ao.grid_points = m.settings.at("alpha_grid_points").get<int>();
  std::vector<CriterionResult> results;
  if (s.rhs.kind() == RhsKind::wazewska) {
    const PeriodicTrajectory nstar = m.settings.at("nstar").is_null()
                                         ? solve_periodic(WazewskaModel(s), m.settings.at("finder")).nstar
                                         : periodic_from_json(m.settings.at("nstar"), "nstar");
    results = check_wazewska_criteria(s, nstar, ao);
  } else {
    results = check_zero_criteria(s, ao);
  }
  write_file(in_dir(dir, m.settings.at("report_file").get<std::string>()), dump_json(report_to_json(results)));
  for (const auto& r : results) {
    std::cout << to_string(r.id) << "  " << to_string(r.verdict) << (r.hypotheses_met ? "" : "  (hypotheses not met)")
              << "\n";
  }
  std::cout << "attractivity established: " << (attractivity_established(results) ? "yes" : "no") << "\n";
  return kOk;
}

int run_verify(const RunManifest& m, const std::string& dir) {
  const Scenario s = scenario_from_json(m.config);
  VerifyOptions vo;
  vo.scales = m.settings.at("scales").get<std::vector<double>>();
  vo.horizon_periods = m.settings.at("horizon").get<int>();
  vo.tol = m.settings.at("tol").get<double>();
  vo.step = {m.settings.at("step").get<double>()};
  AttractivityReport report;
  if (s.rhs.kind() == RhsKind::wazewska) {
    const WazewskaModel model(s);
    const PeriodicTrajectory nstar = m.settings.at("nstar").is_null()
                                         ? solve_periodic(model, m.settings.at("finder")).nstar
                                         : periodic_from_json(m.settings.at("nstar"), "nstar");
    report = verify_attractivity(model, nstar, vo);
  } else {
    const double period = s.omega.value_or(1.0);
    if (m.settings.at("nstar").is_null()) {
      report = verify_attractivity(s, nullptr, period, vo);
    } else {
      const PeriodicTrajectory ref = periodic_from_json(m.settings.at("nstar"), "nstar");
      report = verify_attractivity(s, &ref, period, vo);
    }
  }
  write_file(in_dir(dir, m.settings.at("report_file").get<std::string>()), dump_json(to_json(report)));
  write_file(in_dir(dir, m.settings.at("csv_file").get<std::string>()), attractivity_csv(report));
  for (const auto& run : report.runs) {
    std::cout << "scale " << format_double(run.scale) << ": final value " << format_double(run.final_value) << ", last error " << format_double(run.errors.empty() ? 0.0 : run.errors.back())
              << (run.first_below ? ", below tol from period " + std::to_string(*run.first_below) : ", never below tol")
              << "\n";
  }
  std::cout << (report.attracting() ? "attracting" : "not attracting") << "\n";
  return report.attracting() ? kOk : kAcceptance;
}

int run_reproduce(const std::string& case_id, const std::string& dir, std::optional<int> density) {
  const ReproduceResult r = reproduce(case_id, dir, density);
  std::cout << r.summary;
  return r.passed ? kOk : kAcceptance;
}

int replay(const RunManifest& m, const std::string& dir) {
  if (m.subcommand == "simulate") return run_simulate(m, dir);
  if (m.subcommand == "check") return run_check(m, dir);
  if (m.subcommand == "find-periodic") return run_find_periodic(m, dir);
  if (m.subcommand == "verify") return run_verify(m, dir);
  if (m.subcommand == "reproduce") {
    return run_reproduce(m.settings.at("case").get<std::string>(), dir, m.settings.at("grid_density").get<int>());
  }
  throw ConfigError("manifest.subcommand", "unknown subcommand '" + m.subcommand + "'");
}

json finder_settings(double tol, int max_periods, std::optional<double> n0, double step) {
  return {{"tol", tol}, {"max_periods", max_periods}, {"n0", n0 ? json(*n0) : json()}, {"step", step}};
}

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--scales", "not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--scales", "empty list");
  return out;
}

const char* kFooter = R"(Exit codes: 0 ok, 1 acceptance failure, 2 configuration error, 3 numeric error.
Environment: IDDE_SEED_GRID overrides the default sampling density (4096 points per period).
find-periodic starts from the constant level N0 = sum_i max b_i / min a unless --n0 is given.
verify uses the scales 0.1,0.5,2,10 and 200 periods at tol 1e-6 unless overridden.
Every command writes a manifest next to its outputs; `idde replay --manifest <file>` regenerates them.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impulsive delay differential equations: simulation, stability criteria, periodic solutions"};
  app.footer(kFooter);
  app.require_subcommand(1);

  std::string config, scenario_id, out, manifest_path, plot, report_path, nstar_path, csv_path, scales_text;
  double t_end = 10.0, step = 1e-3, horizon = 50.0, tol = 1e-10, verify_tol = 1e-6;
  int max_periods = 10000, periods = 200;
  std::optional<double> n0;
  bool alt_lambda2 = false;
  int grid_points = AlphaOptions{}.grid_points;

  auto add_scenario = [&](CLI::App* c) {
    c->add_option("--config", config, "scenario JSON file");
    c->add_option("--scenario", scenario_id, "bundled scenario id (see `idde list`)");
    c->add_option("--manifest", manifest_path, "manifest path (default: next to the main output)");
  };

  auto* sim = app.add_subcommand("simulate", "integrate a scenario and write its trajectory as CSV");
  add_scenario(sim);
  sim->add_option("--t-end", t_end, "final time")->capture_default_str();
  sim->add_option("--step", step, "step size")->capture_default_str();
  sim->add_option("--out", out, "trajectory CSV (t,value,side)")->required();
  sim->add_option("--plot", plot, "also write two-column plot data");

  auto* chk = app.add_subcommand("check", "evaluate the attractivity criteria and write a JSON report");
  add_scenario(chk);
  chk->add_option("--periodic-solution", nstar_path, "periodic solution JSON (computed when omitted)");
  chk->add_option("--report", report_path, "report JSON")->required();
  chk->add_option("--horizon", horizon, "sup window for non-periodic data")->capture_default_str();
  chk->add_option("--grid-points", grid_points, "grid points for the sup search")->capture_default_str();
  chk->add_flag("--alt-lambda2", alt_lambda2, "use the exponential-slope bound for lambda2");

  auto* fp = app.add_subcommand("find-periodic", "compute the positive periodic solution of a Wazewska model");
  add_scenario(fp);
  fp->add_option("--tol", tol, "stop when successive periods differ by less")->capture_default_str();
  fp->add_option("--max-periods", max_periods, "period budget")->capture_default_str();
  fp->add_option("--n0", n0, "constant initial level");
  fp->add_option("--step", step, "step size")->capture_default_str();
  fp->add_option("--out", out, "output prefix; writes <prefix>.csv and <prefix>.json")->required();

  auto* ver = app.add_subcommand("verify", "check attraction to N* (or zero) by simulation");
  add_scenario(ver);
  ver->add_option("--nstar", nstar_path, "reference periodic solution JSON (computed or zero when omitted)");
  ver->add_option("--scales", scales_text, "comma-separated history scales")->default_str("0.1,0.5,2,10");
  ver->add_option("--horizon", periods, "number of periods")->capture_default_str();
  ver->add_option("--tol", verify_tol, "attraction tolerance")->capture_default_str();
  ver->add_option("--step", step, "step size")->capture_default_str();
  ver->add_option("--report", report_path, "report JSON")->required();
  ver->add_option("--csv", csv_path, "per-period errors CSV (default: report name with .csv)");

  std::string case_id;
  std::optional<int> density;
  auto* rep = app.add_subcommand("reproduce", "run a bundled case end to end");
  rep->add_option("case", case_id, "example-2-22, liu-takeuchi, graef-compare, boundary-alpha or all")->required();
  rep->add_option("--out", out, "output directory")->required();
  rep->add_option("--grid-density", density, "sampling density override");

  auto* rpl = app.add_subcommand("replay", "regenerate the outputs recorded in a manifest");
  rpl->add_option("--manifest", manifest_path, "manifest JSON")->required();
  rpl->add_option("--out", out, "output directory (default: the manifest's directory)");

  auto* lst = app.add_subcommand("list", "list bundled scenarios and reproducible cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    RunManifest m;
    std::string dir;
    auto finish = [&](const std::string& main_output, int (*run)(const RunManifest&, const std::string&)) {
      dir = dir_of(main_output);
      m.outputs.push_back(manifest_path.empty() ? strip_ext(name_of(main_output)) + ".manifest.json"
                                                : name_of(manifest_path));
      const std::string mpath = manifest_path.empty() ? in_dir(dir, m.outputs.back()) : manifest_path;
      const int code = run(m, dir);
      write_manifest(m, mpath);
      return code;
    };

    if (*sim) {
      m.subcommand = "simulate";
      m.config = scenario_doc(config, scenario_id);
      m.settings = {{"t_end", t_end}, {"step", step}, {"trajectory_file", name_of(out)}};
      m.outputs = {name_of(out)};
      if (!plot.empty()) {
        if (dir_of(plot) != dir_of(out)) throw ConfigError("--plot", "must be in the same directory as --out");
        m.settings["plot_file"] = name_of(plot);
        m.outputs.push_back(name_of(plot));
      }
      return finish(out, run_simulate);
    }
    if (*chk) {
      m.subcommand = "check";
      m.config = scenario_doc(config, scenario_id);
      m.settings = {{"horizon", horizon},
                    {"alt_lambda2", alt_lambda2},
                    {"alpha_grid_points", grid_points},
                    {"verdict_band", kVerdictBand},
                    {"nstar", nstar_path.empty() ? json() : nstar_doc(nstar_path)},
                    {"finder", finder_settings(1e-10, 10000, std::nullopt, 1e-3)},
                    {"report_file", name_of(report_path)}};
      m.outputs = {name_of(report_path)};
      return finish(report_path, run_check);
    }
    if (*fp) {
      m.subcommand = "find-periodic";
      m.config = scenario_doc(config, scenario_id);
      m.settings = finder_settings(tol, max_periods, n0, step);
      m.settings["trajectory_file"] = name_of(out) + ".csv";
      m.settings["report_file"] = name_of(out) + ".json";
      m.outputs = {name_of(out) + ".csv", name_of(out) + ".json"};
      if (manifest_path.empty()) manifest_path = out + ".manifest.json";
      return finish(out, run_find_periodic);
    }
    if (*ver) {
      m.subcommand = "verify";
      m.config = scenario_doc(config, scenario_id);
      const std::string csv = csv_path.empty() ? strip_ext(name_of(report_path)) + ".csv" : name_of(csv_path);
      if (!csv_path.empty() && dir_of(csv_path) != dir_of(report_path)) {
        throw ConfigError("--csv", "must be in the same directory as --report");
      }
      m.settings = {{"scales", scales_text.empty() ? VerifyOptions{}.scales : parse_scales(scales_text)},
                    {"horizon", periods},
                    {"tol", verify_tol},
                    {"step", step},
                    {"nstar", nstar_path.empty() ? json() : nstar_doc(nstar_path)},
                    {"finder", finder_settings(1e-10, 10000, std::nullopt, step)},
                    {"report_file", name_of(report_path)},
                    {"csv_file", csv}};
      m.outputs = {name_of(report_path), csv};
      return finish(report_path, run_verify);
    }
    if (*rep) {
      if (case_id != "all") return run_reproduce(case_id, out, density);
      // Cases run concurrently; summaries are printed in case order.
      std::vector<std::future<ReproduceResult>> jobs;
      for (const auto& c : reproduce_cases()) {
        jobs.push_back(std::async(std::launch::async, [c, &out, density] {
          return reproduce(c, in_dir(out, c), density);
        }));
      }
      bool passed = true;
      for (auto& j : jobs) {
        const ReproduceResult r = j.get();
        std::cout << r.summary;
        passed = passed && r.passed;
      }
      return passed ? kOk : kAcceptance;
    }
    if (*rpl) {
      const RunManifest recorded = manifest_from_json(read_json(manifest_path));
      return replay(recorded, out.empty() ? dir_of(manifest_path) : out);
    }
    if (*lst) {
      for (const auto& b : bundled_scenarios()) {
        std::cout << b.id << "  " << (b.family == ScenarioFamily::wazewska ? "wazewska" : "zero") << "  "
                  << b.description << "\n";
      }
      std::cout << "\nreproduce cases:";
      for (const auto& c : reproduce_cases()) std::cout << " " << c;
      std::cout << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
