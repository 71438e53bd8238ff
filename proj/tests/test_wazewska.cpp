#include <doctest.h>

#include <cmath>
#include <random>

#include "idde/config.hpp"
#include "idde/errors.hpp"
#include "idde/reference.hpp"
#include "idde/transforms.hpp"
#include "idde/wazewska.hpp"

using namespace idde;

namespace {

const char* kConstant = R"({"omega": 1, "damping": 1, "delays": [{"kind": "multiple", "m": 1}],
  "rhs": {"kind": "wazewska", "terms": [{"b": 1, "beta": 1}]}, "history": 1})";

const char* kSine = R"({"omega": 1, "damping": {"kind": "trig", "period": 1, "mean": 1, "cos": [], "sin": [0.5]},
  "delays": [{"kind": "multiple", "m": 1}],
  "rhs": {"kind": "wazewska", "terms": [{"b": 1, "beta": 1}]}, "history": 1,
  "impulses": [{"t": 0.5, "kind": "linear", "params": {"b": -0.1}}]})";

}  // namespace

TEST_CASE("rhs evaluations") {
  const Scenario s = build_scenario(kConstant);
  const double zero[] = {0.0};
  CHECK(wazewska_rhs(s, 0.3, zero) == 1.0);

  const Scenario two = build_scenario(R"({"omega": 1, "damping": 1,
    "delays": [{"kind": "constant", "tau": 0.3}, {"kind": "multiple", "m": 2}],
    "rhs": {"kind": "wazewska", "terms": [{"b": 0.7, "beta": 1.5, "delay": 0}, {"b": 0.2, "beta": 0.5, "delay": 1}]},
    "history": 1})");
  const double v[] = {0.4, 0.9};
  CHECK(wazewska_rhs(two, 0.2, v) == doctest::Approx(0.7 * std::exp(-0.6) + 0.2 * std::exp(-0.45)).epsilon(1e-15));

  const WazewskaModel m(s);
  Trajectory flat(0.0, 0.6);
  flat.append({0.0, 1.0, 0.6, 0.6, 0.0, 0.0});
  const Scenario t = translated_scenario(m, PeriodicTrajectory(flat, 1.0));
  CHECK(wazewska_rhs(t, 0.4, zero) == 0.0);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(WazewskaModel(build_scenario(R"({"damping": 1, "rhs": {"kind": "zero"}, "history": 1})")),
                  ConfigError);
  CHECK_THROWS_AS(WazewskaModel(build_scenario(R"({"omega": 1, "damping": {"kind": "rational", "c": 1, "d": 1, "n": 1},
    "delays": [{"kind": "multiple", "m": 1}], "rhs": {"kind": "wazewska", "terms": [{"b": 1, "beta": 1}]}, "history": 1})")),
                  ConfigError);
  const WazewskaModel m(build_scenario(kConstant));
  CHECK(m.default_level() == 1.0);
  CHECK(m.period_product() == 1.0);
}

TEST_CASE("constant coefficients give the scalar root") {
  const WazewskaModel m(build_scenario(kConstant));
  const PeriodicSolution sol = find_periodic(m);
  const double root = reference::find_root([](double n) { return n * std::exp(n) - 1.0; }, 0.0, 1.0);
  for (double t : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(sol.nstar(t) - root) < 1e-8);
  CHECK(sol.deltas.back() < 1e-10);
  CHECK(sol.periodicity_residual < 1e-10);

  const WazewskaModel id(build_scenario(R"({"omega": 1, "damping": 1, "delays": [{"kind": "multiple", "m": 1}],
    "rhs": {"kind": "wazewska", "terms": [{"b": 1, "beta": 1}]}, "history": 1,
    "impulses": [{"t": 0.5, "kind": "linear", "params": {"b": 0}}]})"));
  const PeriodicSolution same = find_periodic(id);
  for (double t : {0.1, 0.5, 0.6}) CHECK(std::abs(same.nstar(t) - sol.nstar(t)) < 1e-12);
}

TEST_CASE("sinusoidal damping with one impulse") {
  const WazewskaModel m(build_scenario(kSine));
  const PeriodicSolution sol = find_periodic(m);
  CHECK(sol.periodicity_residual < 1e-8);
  CHECK(sol.jump_residual < 1e-12);
  CHECK(sol.nstar.right_limit(0.5) == doctest::Approx(0.9 * sol.nstar(0.5)).epsilon(1e-12));
  CHECK(sol.nstar.min_value() > 0.0);

  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.0025 + i * 0.005;
    if (std::abs(t - 0.5) > 0.002) grid.push_back(t);
  }
  CHECK(equilibrium_residual(m, sol.nstar, grid) < 1e-4);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(ratio_identity_defect(m.scenario(), sol.nstar, a, b) < 1e-8);
  }

  const json j = to_json(sol);
  CHECK(j["periods"].get<int>() == sol.periods);
}

TEST_CASE("non-convergence carries the delta tail") {
  const WazewskaModel m(build_scenario(kSine));
  FinderOptions o;
  o.max_periods = 3;
  try {
    find_periodic(m, o);
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.tail().size() == 2);
    CHECK(std::string(e.what()).find("unresolved") != std::string::npos);
  }
}

TEST_CASE("attractivity of the periodic solution") {
  const WazewskaModel m(build_scenario(kSine));
  const PeriodicSolution sol = find_periodic(m);
  VerifyOptions o;
  o.scales = {1.0, 0.1, 10.0};
  o.horizon_periods = 60;
  const AttractivityReport r = verify_attractivity(m, sol.nstar, o);
  REQUIRE(r.runs.size() == 3);
  CHECK(r.runs[0].errors.front() < 1e-9);
  CHECK(r.runs[0].first_below == 0);
  CHECK(r.attracting());
  CHECK(to_json(r)["verdict"] == "attracting");
}

TEST_CASE("zero is not attracting for the counterexample") {
  const Scenario s = build_scenario(R"({"damping": {"kind": "rational", "c": 1, "d": 1, "n": 2},
    "delays": [{"kind": "constant", "tau": 0.5}],
    "rhs": {"kind": "piecewise_linear", "terms": [{"delay": 0, "breakpoints": [-1, 0, 1], "values": [1, 0, 0]}]},
    "history": {"kind": "exp_reciprocal", "c": 1, "k": 1, "d": 1}})");
  VerifyOptions o;
  o.scales = {1.0, 2.0};
  o.horizon_periods = 50;
  const AttractivityReport r = verify_attractivity(s, nullptr, 1.0, o);
  CHECK_FALSE(r.attracting());
  for (const auto& run : r.runs) CHECK(run.final_value > 0.9 * run.scale);
}
