#include "idde/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "idde/errors.hpp"

namespace idde {

namespace {

Trajectory materialize_history(const Scenario& s, double window, double h) {
  if (const auto* traj = std::get_if<Trajectory>(&s.history)) return *traj;
  const Fn& phi = std::get<Fn>(s.history);
  if (window <= 0.0) return Trajectory(s.t0, phi(0.0));
  std::vector<double> nodes = phi.knots(-window, 0.0);
  nodes.push_back(-window);
  nodes.push_back(0.0);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Trajectory out(s.t0 - window, phi(-window));
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const double a = nodes[j];
    const double b = nodes[j + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    for (int i = 0; i < n; ++i) {
      const double s0 = a + (b - a) * i / n;
      const double s1 = i + 1 == n ? b : a + (b - a) * (i + 1) / n;
      const double t1 = i + 1 == n && j + 2 == nodes.size() ? s.t0 : s.t0 + s1;
      out.append({out.t_end(), t1, out.end_value(), phi(s1), phi.derivative(s0), phi.derivative(s1)});
    }
  }
  return out;
}

}  // namespace

Integrator::Integrator(Scenario scenario, StepControl control)
    : scenario_(std::move(scenario)), control_(control) {
  if (!(control_.step > 0.0) || !std::isfinite(control_.step)) throw ConfigError("step", "step must be positive");
  if (!(control_.snap_tolerance >= 0.0)) throw ConfigError("snap_tolerance", "must be >= 0");
  used_ = scenario_.rhs.used_delays();
  lags_.assign(scenario_.delays.size(), 0.0);
  tau_bar_ = scenario_.tau_bar();
  // Lookbacks at t0 are the deepest ones because t - tau(t) is non-decreasing.
  double window = 0.0;
  for (std::size_t i : used_) window = std::max(window, scenario_.delays[i].tau(scenario_.t0));
  traj_ = materialize_history(scenario_, window, control_.step);
  traj_.mark_breakpoint(scenario_.t0);
}

double Integrator::lookback(double t) const {
  double lo = t;
  for (std::size_t i : used_) lo = std::min(lo, scenario_.delays[i].lag_point(t));
  return lo;
}

double Integrator::delayed(double lag, Side side) const {
  const double tol = control_.snap_tolerance * std::max(1.0, std::abs(lag));
  const auto jumps = traj_.jumps();
  auto it = std::lower_bound(jumps.begin(), jumps.end(), lag - tol, [](const Jump& j, double v) { return j.t < v; });
  if (it != jumps.end() && it->t <= lag + tol) return side == Side::right ? it->right : it->left;
  if (lag < traj_.t_start() - tol) {
    throw DomainError("delayed lookup at t=" + std::to_string(lag) + " precedes the history window", traj_.t_start(),
                      traj_.t_end());
  }
  return side == Side::right ? traj_.eval_right_limit(lag) : traj_.eval(lag);
}

double Integrator::field(double t, double x, Side side) {
  const double t_known = traj_.t_end();
  for (std::size_t i : used_) {
    const double lag = scenario_.delays[i].lag_point(t);
    if (lag > t_known + control_.snap_tolerance * std::max(1.0, std::abs(t_known))) {
      throw ConfigError("delays[" + std::to_string(i) + "]",
                        "delay shorter than the step near t=" + std::to_string(t) + " (vanishing delay)");
    }
    lags_[i] = delayed(std::min(lag, t_known), side);
  }
  return -scenario_.damping(t) * x + scenario_.rhs.eval(t, lags_, scenario_.delays, side);
}

std::map<double, int> Integrator::plan_nodes(double lo, double hi) const {
  // value > 0 marks an impulse index, 0 an ordinary breakpoint.
  std::map<double, int> nodes;
  const ImpulseSchedule& imp = scenario_.impulses;
  if (!imp.empty()) {
    for (long k : imp.indices_in(std::max(lo, scenario_.t0), hi, false, true)) nodes.emplace(imp.instant(k), int(k));
  }
  const double src_lo = std::max(scenario_.t0 - tau_bar_, lo - 2.0 * tau_bar_);
  std::vector<double> gen;
  if (scenario_.t0 >= src_lo) gen.push_back(scenario_.t0);
  if (!imp.empty()) {
    for (long k : imp.indices_in(std::max(src_lo, scenario_.t0), hi, false, true)) gen.push_back(imp.instant(k));
  }
  for (const Jump& j : traj_.jumps()) {
    if (j.t >= src_lo && j.t <= scenario_.t0) gen.push_back(j.t);
  }
  for (double c : scenario_.coefficient_breakpoints(src_lo, hi)) gen.push_back(c);
  // Direct breakpoints win over propagated copies that round differently.
  std::vector<double> direct = gen;
  std::vector<double> cand;
  for (int g = 1; g <= 2; ++g) {
    std::vector<double> next;
    for (double xi : gen) {
      for (std::size_t i : used_) {
        const DelaySpec& d = scenario_.delays[i];
        if (d.is_zero()) continue;
        const double t = d.lag_preimage(xi);
        if (t <= hi) next.push_back(t);
      }
    }
    cand.insert(cand.end(), next.begin(), next.end());
    gen = std::move(next);
  }
  const double tol = control_.snap_tolerance;
  auto near_existing = [&](double t) {
    const double eps = tol * std::max(1.0, std::abs(t));
    if (std::abs(t - lo) <= eps) return true;
    auto it = nodes.lower_bound(t - eps);
    return it != nodes.end() && it->first <= t + eps;
  };
  for (auto* list : {&direct, &cand}) {
    std::sort(list->begin(), list->end());
    for (double t : *list) {
      if (t <= lo || t > hi) continue;
      if (!near_existing(t)) nodes.emplace(t, 0);
    }
  }
  if (!near_existing(hi)) nodes.emplace(hi, 0);
  return nodes;
}

void Integrator::step(double t1, bool reuse_slope) {
  const double t0 = traj_.t_end();
  const double x0 = traj_.end_value();
  const double h = t1 - t0;
  const double k1 = reuse_slope ? cached_slope_ : field(t0, x0, Side::right);
  const double k2 = field(t0 + 0.5 * h, x0 + 0.5 * h * k1, Side::left);
  const double k3 = field(t0 + 0.5 * h, x0 + 0.5 * h * k2, Side::left);
  const double k4 = field(t1, x0 + h * k3, Side::left);
  const double x1 = x0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!std::isfinite(x1) || std::abs(x1) > kDivergenceBound) throw DivergenceError(t1, x1);
  traj_.append({t0, t1, x0, x1, k1, 0.0});
  // The end slope needs x(t1) itself when the lookup reaches the new point.
  const double d1 = field(t1, x1, Side::left);
  traj_.set_end_slope(d1);
  cached_slope_ = d1;
}

void Integrator::advance_to(double t_end) {
  double lo = traj_.t_end();
  if (!(t_end > lo)) {
    if (t_end == lo) return;
    throw ConfigError("t_end", "must exceed the current time " + std::to_string(lo));
  }
  if (t_end - scenario_.t0 > control_.max_horizon) throw ConfigError("t_end", "beyond the maximum horizon");
  const auto nodes = plan_nodes(lo, t_end);
  const double h = control_.step;
  bool reuse = false;
  for (const auto& [node, k] : nodes) {
    const double a = traj_.t_end();
    const int n = std::max(1, static_cast<int>(std::ceil((node - a) / h - 1e-9)));
    for (int i = 1; i <= n; ++i) {
      step(i == n ? node : a + (node - a) * i / n, reuse);
      reuse = true;
    }
    traj_.mark_breakpoint(node);
    reuse = false;
    if (k > 0) {
      const double left = traj_.end_value();
      const double right = left + scenario_.impulses.apply(k, left);
      if (!std::isfinite(right) || std::abs(right) > kDivergenceBound) throw DivergenceError(node, right);
      traj_.add_jump(right);
    }
  }
}

void Integrator::discard_before(double t) {
  const double keep = std::min(lookback(t), t - tau_bar_) - control_.step;
  traj_.trim_before(keep);
}

Trajectory integrate(const Scenario& scenario, const StepControl& control, double t_end) {
  Integrator integ(scenario, control);
  integ.advance_to(t_end);
  return integ.release();
}

double residual_check(const Trajectory& traj, const Scenario& s, std::span<const double> grid, double step) {
  const double delta = step / 4.0;
  std::vector<double> marks(traj.breakpoints().begin(), traj.breakpoints().end());
  for (const Jump& j : traj.jumps()) marks.push_back(j.t);
  std::sort(marks.begin(), marks.end());
  std::vector<double> lags(s.delays.size(), 0.0);
  const auto used = s.rhs.used_delays();
  double worst = 0.0;
  for (double t : grid) {
    auto it = std::lower_bound(marks.begin(), marks.end(), t);
    const bool near_next = it != marks.end() && *it - t <= step;
    const bool near_prev = it != marks.begin() && t - *(it - 1) <= step;
    if (near_next || near_prev) {
      throw ConfigError("grid", "sample t=" + std::to_string(t) + " lies within one step of a breakpoint");
    }
    const double dx = (-traj.eval(t + 2 * delta) + 8 * traj.eval(t + delta) - 8 * traj.eval(t - delta) +
                       traj.eval(t - 2 * delta)) /
                      (12 * delta);
    for (std::size_t i : used) lags[i] = traj.eval(s.delays[i].lag_point(t));
    const double f = s.rhs.eval(t, lags, s.delays, Side::left);
    worst = std::max(worst, std::abs(dx + s.damping(t) * traj.eval(t) - f));
  }
  return worst;
}

}  // namespace idde
