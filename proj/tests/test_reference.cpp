#include <doctest.h>

#include <cmath>
#include <random>

#include "idde/config.hpp"
#include "idde/errors.hpp"
#include "idde/integrator.hpp"
#include "idde/reference.hpp"

using namespace idde;

TEST_CASE("Euler on exponential decay") {
  const Scenario s = build_scenario(R"({"damping": 1, "rhs": {"kind": "zero"}, "history": 1})");
  const Trajectory x = reference::euler_integrate(s, 1e-4, 1.0);
  CHECK(std::abs(x.eval(1.0) - std::exp(-1.0)) < 5e-4);
  CHECK(x.t_end() == 1.0);
}

TEST_CASE("Euler applies impulses exactly") {
  const Scenario s = build_scenario(R"({"omega": 1, "damping": 0, "rhs": {"kind": "zero"}, "history": 1,
    "impulses": [{"t": 0.5, "kind": "linear", "params": {"b": 1}}]})");
  const Trajectory x = reference::euler_integrate(s, 0.1, 2.0);
  CHECK(x.eval(0.5) == 1.0);
  CHECK(x.eval_right_limit(0.5) == 2.0);
  CHECK(x.eval(1.2) == 2.0);
  CHECK(x.eval(2.0) == 4.0);
  CHECK(x.jumps().size() == 2);
}

TEST_CASE("Euler and RK4 agree on a Wazewska run") {
  const Scenario s = build_scenario(R"({"omega": 1, "damping": {"kind": "trig", "period": 1, "mean": 1, "cos": [0.3], "sin": [0.1]},
    "delays": [{"kind": "constant", "tau": 0.7}],
    "rhs": {"kind": "wazewska", "terms": [{"b": 0.8, "beta": 1}]}, "history": 0.5,
    "impulses": [{"t": 0.4, "kind": "linear", "params": {"b": -0.2}}]})");
  const Trajectory e = reference::euler_integrate(s, 1e-5, 1.0);
  const Trajectory r = integrate(s, {1e-3}, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) worst = std::max(worst, std::abs(e.eval(i / 1000.0) - r.eval(i / 1000.0)));
  CHECK(worst < 1e-3);
}

TEST_CASE("brute-force B") {
  const ImpulseSchedule none;
  CHECK(reference::brute_force_B(none, 1.0, 2.0) == 1.0);
  const ImpulseSchedule one({{0.5, ImpulseMap::linear(-0.5), {}}}, 1.0);
  CHECK(reference::brute_force_B(one, 1.0, 0.75) == 2.0);
  const ImpulseSchedule two({{0.25, ImpulseMap::linear(-0.5), {}}, {0.5, ImpulseMap::linear(1.0), {}}}, 1.0);
  CHECK(reference::brute_force_B(two, 1.0, 0.75) == 1.0);
}

TEST_CASE("big_B matches the enumerator") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double omega = 0.5 + 2.0 * u(rng);
    const int p = 1 + static_cast<int>(4 * u(rng));
    std::vector<Impulse> base;
    for (int k = 0; k < p; ++k) base.push_back({omega * (k + 0.2 + 0.6 * u(rng)) / p, ImpulseMap::linear(-0.8 + 2.0 * u(rng)), {}});
    const ImpulseSchedule sch(base, omega);
    const double tau = 3.0 * omega * u(rng);
    const double t = 10.0 * u(rng);
    const double b = big_B(sch, DelaySpec::constant(tau), t);
    CHECK(b == doctest::Approx(reference::brute_force_B(sch, tau, t)).epsilon(1e-12));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("Riemann alpha") {
  const std::string base = R"({"omega": 1, "delays": [{"kind": "constant", "tau": 1}], "rhs": {"kind": "zero"}, "history": 1,
    "yorke": [{"delay": 0, "lambda1": 1, "lambda2": 1}], )";
  const Scenario c = build_scenario(base + R"("damping": 1})");
  CHECK(std::abs(reference::riemann_alpha(c, c.yorke, AlphaVariant::multi, 1, 2.0, 1'000'000) - (1 - std::exp(-1.0))) < 1e-5);
  const Scenario z = build_scenario(base + R"("damping": 0})");
  CHECK(std::abs(reference::riemann_alpha(z, z.yorke, AlphaVariant::multi, 1, 2.0, 1'000'000) - 1.0) < 1e-6);
  const Scenario i = build_scenario(base + R"("damping": 0, "impulses": [{"t": 0.5, "kind": "linear", "params": {"b": -0.5}}]})");
  CHECK(std::abs(reference::riemann_alpha(i, i.yorke, AlphaVariant::multi, 1, 1.75, 1'000'000) - 2.0) < 1e-5);
}

TEST_CASE("scalar root") {
  const double n = reference::find_root([](double x) { return x * std::exp(x) - 1.0; }, 0.0, 1.0);
  CHECK(n == doctest::Approx(0.5671432904097838).epsilon(1e-15));
  CHECK_THROWS_AS(reference::find_root([](double x) { return x * x + 1.0; }, 0.0, 1.0), NumericError);
}
