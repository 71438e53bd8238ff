#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "idde/errors.hpp"
#include "idde/trajectory.hpp"

using namespace idde;

namespace {

// Hermite samples of f on [lo, hi] with n uniform steps.
template <class F, class D>
Trajectory sampled(F f, D df, double lo, double hi, int n) {
  Trajectory tr(lo, f(lo));
  for (int i = 0; i < n; ++i) {
    const double a = lo + (hi - lo) * i / n;
    const double b = i + 1 == n ? hi : lo + (hi - lo) * (i + 1) / n;
    tr.append({a, b, f(a), f(b), df(a), df(b)});
  }
  return tr;
}

Trajectory step_down() {
  Trajectory tr(-1.0, 1.0);
  tr.append({-1.0, 1.0, 1.0, 1.0, 0.0, 0.0});
  tr.add_jump(0.5);
  tr.append({1.0, 3.0, 0.5, 0.5, 0.0, 0.0});
  return tr;
}

}  // namespace

TEST_CASE("left continuity at a jump") {
  const Trajectory tr = step_down();
  CHECK(tr.eval(1.0) == 1.0);
  CHECK(tr.eval_right_limit(1.0) == 0.5);
  CHECK(tr.eval(1.5) == 0.5);
  CHECK(tr.eval_right_limit(0.2) == 1.0);
  CHECK(tr.end_value() == 0.5);
}

TEST_CASE("evaluation outside the domain reports the range") {
  const Trajectory tr = step_down();
  try {
    tr.eval(3.5);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(e.lo() == -1.0);
    CHECK(e.hi() == 3.0);
  }
}

TEST_CASE("hermite dense output of an exponential") {
  auto f = [](double t) { return std::exp(-t); };
  auto df = [](double t) { return -std::exp(-t); };
  const Trajectory tr = sampled(f, df, 0.0, 1.0, 1000);
  CHECK(std::abs(tr.eval(0.5) - std::exp(-0.5)) < 1e-9);
  double worst = 0.0;
  for (int i = 0; i <= 997; ++i) {
    const double t = i * 1e-3 + 3.7e-4;
    worst = std::max(worst, std::abs(tr.eval(t) - f(t)));
  }
  CHECK(worst < 1e-12);
  CHECK(tr.derivative(0.3) == doctest::Approx(df(0.3)).epsilon(1e-8));
}

TEST_CASE("step endpoints are reproduced exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Trajectory tr(0.0, u(rng));
  for (int i = 0; i < 100; ++i) tr.append({tr.t_end(), tr.t_end() + 0.01 * (1 + i % 3), tr.end_value(), u(rng), u(rng), u(rng)});
  for (const Segment& s : tr.segments()) {
    CHECK(tr.eval(s.t1) == s.x1);
    CHECK(tr.eval(s.t0) == s.x0);
  }
}

TEST_CASE("yorke functional") {
  Trajectory neg(0.0, -1.0);
  neg.append({0.0, 2.0, -1.0, -1.0, 0.0, 0.0});
  CHECK(neg.yorke_sup(2.0, 1.0, +1) == 0.0);
  CHECK(neg.yorke_sup(2.0, 1.0, -1) == 1.0);

  Trajectory two(0.0, 2.0);
  two.append({0.0, 2.0, 2.0, 2.0, 0.0, 0.0});
  CHECK(two.yorke_sup(2.0, 1.0, +1) == 2.0);

  const double pi = M_PI;
  const Trajectory s = sampled([](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }, -pi, pi / 2, 37);
  CHECK(std::abs(s.yorke_sup(pi / 2, pi, +1) - 1.0) < 1e-9);
  // A coarse grid whose endpoints miss the peak still finds it through the cubic's critical points.
  const Trajectory c = sampled([](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }, 0.0, 3.0, 7);
  CHECK(std::abs(c.yorke_sup(3.0, 3.0, +1) - 1.0) < 1e-4);
  CHECK(c.yorke_sup(3.0, 3.0, +1) > std::max(c.eval(3.0 * 3 / 7), c.eval(3.0 * 4 / 7)));
}

TEST_CASE("yorke functional sees both jump sides") {
  const Trajectory tr = step_down();
  CHECK(tr.yorke_sup(2.0, 1.0, +1) == 1.0);  // left value at t=1 is inside [1, 2]
  CHECK(tr.yorke_sup(2.0, 0.5, +1) == 0.5);
  CHECK(tr.yorke_sup(1.0, 0.0, +1) == 1.0);
}

TEST_CASE("yorke properties on random trajectories") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Trajectory tr(0.0, u(rng));
    for (int i = 0; i < 60; ++i) {
      tr.append({tr.t_end(), tr.t_end() + 0.05, tr.end_value(), u(rng), 3 * u(rng), 3 * u(rng)});
      if (i % 17 == 5) tr.add_jump(u(rng));
    }
    const double t = 2.9;
    double prev_pos = 0.0;
    for (double tau : {0.0, 0.3, 0.7, 1.4, 2.9}) {
      const double pos = tr.yorke_sup(t, tau, +1);
      const double neg = tr.yorke_sup(t, tau, -1);
      CHECK(pos >= prev_pos);
      prev_pos = pos;
      double dense = 0.0;
      for (int i = 0; i <= 20000; ++i) {
        const double s = t - tau + tau * i / 20000.0;
        dense = std::max({dense, std::abs(tr.eval(s)), std::abs(tr.eval_right_limit(s))});
      }
      CHECK(std::max(pos, neg) >= dense - 1e-12);
      CHECK(std::max(pos, neg) == doctest::Approx(tr.sup_abs(t - tau, t)));
    }
  }
}

TEST_CASE("csv export writes both jump sides") {
  std::ostringstream out;
  step_down().write_csv(out);
  CHECK(out.str() == "t,value,side\n-1,1,interior\n1,1,left\n1,0.5,right\n3,0.5,interior\n");
}

TEST_CASE("periodic trajectory") {
  Trajectory per(0.0, 1.0);
  per.append({0.0, 0.5, 1.0, 2.0, 0.0, 0.0});
  per.add_jump(1.5);
  per.append({0.5, 1.0, 1.5, 1.0, 0.0, 0.0});
  const PeriodicTrajectory p(per, 1.0);
  CHECK(p(3.5) == 2.0);
  CHECK(p.right_limit(3.5) == 1.5);
  CHECK(p(3.0) == 1.0);
  CHECK(p(3.25) == doctest::Approx(per.eval(0.25)));
  CHECK(p.max_value() == 2.0);
  CHECK(p.min_value() == 1.0);
  const Trajectory ext = p.extended(-0.25, 2.25);
  CHECK(ext.jumps().size() == 2);
  CHECK(ext.eval(1.5) == 2.0);
  CHECK(ext.eval_right_limit(1.5) == 1.5);
  CHECK(ext.eval(0.7) == doctest::Approx(p(0.7)).epsilon(1e-14));
  CHECK(ext.eval(2.2) == doctest::Approx(p(2.2)).epsilon(1e-14));
}

TEST_CASE("trim and transform") {
  Trajectory tr = step_down();
  const Trajectory y = tr.transformed(1.0, 2.0);
  CHECK(y.eval(2.0) == 2.0);
  CHECK(y.eval_right_limit(2.0) == 1.0);
  tr.append({3.0, 4.0, 0.5, 0.5, 0.0, 0.0});
  tr.trim_before(2.0);
  CHECK(tr.t_start() == 1.0);
  CHECK(tr.eval(2.5) == 0.5);
}
