#include <doctest.h>

#include <cmath>
#include <random>

#include "idde/config.hpp"
#include "idde/errors.hpp"
#include "idde/integrator.hpp"

using namespace idde;

namespace {

Scenario decay() { return build_scenario(R"({"damping": 1, "rhs": {"kind": "zero"}, "history": 1})"); }

Scenario example_feedback() {
  return build_scenario(R"({
    "damping": {"kind": "rational", "c": 1, "d": 1, "n": 2},
    "delays": [0.5],
    "rhs": {"kind": "piecewise_linear", "terms": [{"delay": 0, "breakpoints": [-1, 0, 1], "values": [1, 0, 0]}]},
    "history": {"kind": "exp_reciprocal", "c": 1, "k": 1, "d": 1}})");
}

Scenario wazewska(double a, double b, double beta, double bk) {
  json doc = json::parse(R"({"omega": 1, "delays": [{"kind": "multiple", "m": 1}], "history": 0.8})");
  doc["damping"] = {{"kind", "trig"}, {"period", 1}, {"mean", a}, {"cos", {0.2}}, {"sin", {0.1}}};
  doc["rhs"] = {{"kind", "wazewska"}, {"terms", {{{"b", b}, {"beta", beta}, {"delay", 0}}}}};
  if (bk != 0.0) doc["impulses"] = {{{"t", 0.5}, {"kind", "linear"}, {"params", {{"b", bk}}}}};
  return scenario_from_json(doc);
}

double max_error_decay(double h) {
  const Trajectory tr = integrate(decay(), {h}, 2.0);
  double worst = 0.0;
  for (const Segment& s : tr.segments()) worst = std::max(worst, std::abs(s.x1 - std::exp(-s.t1)));
  return worst;
}

}  // namespace

TEST_CASE("exponential decay") {
  const Trajectory tr = integrate(decay(), {1e-3}, 1.0);
  CHECK(std::abs(tr.eval(1.0) - std::exp(-1.0)) < 1e-9);
  std::vector<double> grid;
  for (int i = 1; i < 40; ++i) grid.push_back(0.025 * i + 0.0003);
  CHECK(residual_check(tr, decay(), grid, 1e-3) < 1e-6);
}

TEST_CASE("fourth-order convergence") {
  for (double h : {1e-2, 5e-3}) {
    const double ratio = max_error_decay(h) / max_error_decay(h / 2);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("piecewise-constant impulsive dynamics are exact") {
  const Scenario s = build_scenario(R"({"omega": 10, "damping": 0, "rhs": {"kind": "zero"}, "history": 1,
    "impulses": [{"t": 1, "kind": "linear", "params": {"b": -0.5}}]})");
  const Trajectory tr = integrate(s, {1e-3}, 3.0);
  CHECK(tr.eval(1.0) == 1.0);
  CHECK(tr.eval_right_limit(1.0) == 0.5);
  CHECK(tr.eval(2.0) == 0.5);
  CHECK(tr.jumps().size() == 1);
  std::vector<double> grid = {0.5, 1.5, 2.5};
  CHECK(residual_check(tr, s, grid, 1e-3) == 0.0);
}

TEST_CASE("impulse applied at the final time") {
  const Scenario s = build_scenario(R"({"omega": 10, "damping": 0, "rhs": {"kind": "zero"}, "history": 1,
    "impulses": [{"t": 1, "kind": "linear", "params": {"b": 1}}]})");
  Integrator integ(s, {1e-2});
  integ.advance_to(1.0);
  CHECK(integ.state() == 2.0);
  integ.advance_to(1.5);
  CHECK(integ.trajectory().jumps().size() == 1);
}

TEST_CASE("closed-form family of the feedback example") {
  const Trajectory tr = integrate(example_feedback(), {1e-3}, 5.0);
  CHECK(std::abs(tr.eval(1.0) - std::exp(0.5)) < 1e-6);
  double worst = 0.0;
  for (int i = 0; i <= 500; ++i) {
    const double t = 0.01 * i;
    worst = std::max(worst, std::abs(tr.eval(t) / std::exp(1.0 / (t + 1.0)) - 1.0));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("breakpoints propagate through the delay") {
  const Trajectory tr = integrate(example_feedback(), {1e-3}, 2.0);
  const auto bp = tr.breakpoints();
  auto has = [&](double t) {
    return std::any_of(bp.begin(), bp.end(), [t](double b) { return std::abs(b - t) < 1e-12; });
  };
  CHECK(has(0.0));
  CHECK(has(0.5));
  CHECK(has(1.0));
  CHECK_FALSE(has(1.5));  // third generation is not tracked
}

TEST_CASE("impulse jumps are exact and positivity holds") {
  const Scenario s = wazewska(1.0, 1.0, 1.0, -0.4);
  const Trajectory tr = integrate(s, {1e-3}, 20.0);
  CHECK(tr.jumps().size() == 20);
  for (const Jump& j : tr.jumps()) {
    CHECK(std::abs(j.right - j.left - (-0.4 * j.left)) <= 1e-14 * std::abs(j.left));
  }
  double lowest = 1.0;
  for (const Segment& seg : tr.segments()) lowest = std::min({lowest, seg.x0, seg.x1});
  CHECK(lowest > 0.0);
}

TEST_CASE("residual shrinks at fourth-order rate under step halving") {
  const Scenario s = wazewska(1.3, 0.9, 1.2, 0.0);
  std::vector<double> grid;
  for (int k = 1; k < 5; ++k)
    for (int j = 0; j < 6; ++j) grid.push_back(k + 0.2 + 0.12 * j + 0.0123);
  double prev = 0.0;
  for (double h : {4e-2, 2e-2}) {
    const Trajectory tr = integrate(s, {h}, 5.0);
    const double r = residual_check(tr, s, grid, h);
    if (prev > 0.0) CHECK(prev / r >= 8.0);
    prev = r;
  }
}

TEST_CASE("residual check refuses samples next to breakpoints") {
  const Trajectory tr = integrate(decay(), {1e-3}, 1.0);
  const double grid[] = {1.0 - 5e-4};
  CHECK_THROWS_AS(residual_check(tr, decay(), grid, 1e-3), ConfigError);
}

TEST_CASE("determinism") {
  const Scenario s = wazewska(1.0, 1.0, 1.0, -0.2);
  const Trajectory a = integrate(s, {1e-3}, 5.0);
  const Trajectory b = integrate(s, {1e-3}, 5.0);
  REQUIRE(a.segments().size() == b.segments().size());
  for (std::size_t i = 0; i < a.segments().size(); ++i) {
    CHECK(a.segments()[i].x1 == b.segments()[i].x1);
    CHECK(a.segments()[i].d1 == b.segments()[i].d1);
  }
}

TEST_CASE("incremental advance equals one-shot integration") {
  const Scenario s = wazewska(1.0, 1.0, 1.0, -0.2);
  const Trajectory a = integrate(s, {1e-3}, 4.0);
  Integrator integ(s, {1e-3});
  for (double t = 1.0; t <= 4.0; t += 1.0) integ.advance_to(t);
  CHECK(integ.state() == a.end_value());
}

TEST_CASE("error reporting") {
  SUBCASE("vanishing delay") {
    const Scenario s = build_scenario(R"({"damping": 1, "delays": [0.0005],
      "rhs": {"kind": "piecewise_linear", "terms": [{"breakpoints": [0, 1], "values": [0, -1]}]}, "history": 1})");
    CHECK_THROWS_AS(integrate(s, {1e-3}, 1.0), ConfigError);
  }
  SUBCASE("divergence") {
    const Scenario s = build_scenario(R"({"damping": 0, "delays": [1],
      "rhs": {"kind": "piecewise_linear", "terms": [{"breakpoints": [0, 1], "values": [0, 10]}]}, "history": 1})");
    try {
      integrate(s, {1e-2}, 100.0);
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.time() > 1.0);
      CHECK(e.time() < 100.0);
    }
  }
  SUBCASE("bad step") { CHECK_THROWS_AS(integrate(decay(), {-1.0}, 1.0), ConfigError); }
  SUBCASE("history too short") {
    Scenario s = example_feedback();
    Trajectory h(-0.1, 1.0);
    h.append({-0.1, 0.0, 1.0, 1.0, 0.0, 0.0});
    s.history = h;
    CHECK_THROWS_AS(validate(s), ConfigError);
    CHECK_THROWS_AS(integrate(s, {1e-3}, 1.0), DomainError);
  }
}
