#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "idde/fn.hpp"
#include "idde/quadrature.hpp"

using idde::Fn;

namespace {

// Plain composite midpoint rule, independent of the library quadrature.
double midpoint(const Fn& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(lo + (i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_CASE("periodic representations repeat after one period") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const Fn fns[] = {Fn::constant(2.5), Fn::trig(1.0, 1.0, {0.3, -0.1}, {0.5}),
                    Fn::trig(0.7, -0.2, {}, {1.1, 0.2, 0.05}), Fn::tabulated(2.0, {1.0, 3.0, 2.0, 0.5})};
  for (const Fn& f : fns) {
    const double w = f.period().value_or(1.0);
    for (int i = 0; i < 2000; ++i) {
      const double t = u(rng);
      CHECK(std::abs(f(t + w) - f(t)) <= 1e-12 * (1.0 + std::abs(f(t))));
    }
  }
}

TEST_CASE("integrals agree with a fine midpoint rule") {
  const Fn fns[] = {Fn::constant(-1.5),
                    Fn::trig(1.0, 1.0, {0.3, -0.1}, {0.5}),
                    Fn::tabulated(2.0, {1.0, 3.0, 2.0, 0.5}),
                    Fn::rational(1.0, 1.0, 2),
                    Fn::exponential(2.0, -0.3),
                    Fn::exp_reciprocal(1.0, 1.0, 1.0)};
  const std::pair<double, double> windows[] = {{0.0, 1.0}, {-0.4, 3.7}, {2.3, 2.9}};
  for (const Fn& f : fns) {
    for (auto [lo, hi] : windows) {
      const double ref = midpoint(f, lo, hi, 200000);
      CHECK(f.integral(lo, hi) == doctest::Approx(ref).epsilon(1e-8));
      CHECK(f.integral(hi, lo) == doctest::Approx(-ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("derivatives agree with centered differences") {
  const Fn fns[] = {Fn::trig(1.0, 1.0, {0.3, -0.1}, {0.5}), Fn::rational(3.0, 2.0, 3), Fn::exponential(2.0, -0.3),
                    Fn::exp_reciprocal(1.0, 1.0, 1.0)};
  for (const Fn& f : fns) {
    for (double t : {0.1, 0.77, 2.5}) {
      const double h = 1e-5;
      const double fd = (f(t + h) - f(t - h)) / (2 * h);
      CHECK(f.derivative(t) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("integral to infinity") {
  CHECK(*Fn::rational(1.0, 1.0, 2).integral_to_infinity() == doctest::Approx(1.0));
  CHECK(*Fn::exponential(2.0, -0.5).integral_to_infinity() == doctest::Approx(4.0));
  CHECK(std::isinf(*Fn::trig(1.0, 0.5, {0.4}, {}).integral_to_infinity()));
  CHECK(std::isinf(*Fn::constant(1.0).integral_to_infinity()));
}

TEST_CASE("tabulated knots and sampled extrema") {
  const Fn f = Fn::tabulated(1.0, {0.0, 2.0, 1.0, -1.0});
  const auto k = f.knots(0.0, 1.0);
  CHECK(k.size() == 5);
  CHECK(f.sampled_max(0.0, 1.0, 10) == 2.0);
  CHECK(f.sampled_min(0.0, 1.0, 10) == -1.0);
  CHECK(f(0.125) == doctest::Approx(1.0));
  CHECK(f(1.125) == doctest::Approx(1.0));
}

TEST_CASE("scaling is exact for closed forms") {
  const Fn f = Fn::trig(1.0, 1.0, {0.3}, {0.5});
  const Fn g = f.scaled(3.0);
  for (double t : {0.0, 0.3, 0.9}) CHECK(g(t) == doctest::Approx(3.0 * f(t)).epsilon(1e-15));
}

TEST_CASE("custom functions fall back to numerical derivative and integral") {
  const Fn f = Fn::custom([](double t) { return std::sin(t); });
  CHECK(f.derivative(0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-9));
  CHECK(f.integral(0.0, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-11));
  CHECK_FALSE(f.serializable());
}

TEST_CASE("simpson with Richardson doubling") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3 * x); };
  const auto r = idde::quad::simpson_richardson(f, 0.0, 2.0, 1e-13, 1e-13);
  const double exact = (1.0 + std::exp(-2.0) * (3.0 * std::sin(6.0) - std::cos(6.0))) / 10.0;
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-12));
}
