#pragma once

#include <limits>
#include <map>
#include <span>

#include "idde/model.hpp"
#include "idde/trajectory.hpp"

namespace idde {

struct StepControl {
  double step = 1e-3;
  /// Breakpoints closer than this are merged; delayed lookups this close to a
  /// jump are snapped onto it.
  double snap_tolerance = 1e-10;
  double max_horizon = std::numeric_limits<double>::infinity();
};

/// Overflow guard: |x| above this declares divergence.
inline constexpr double kDivergenceBound = 1e12;

/// Method of steps with fixed-step RK4 between breakpoints and cubic Hermite
/// dense output. The scenario is copied, so the integrator owns all state.
class Integrator {
 public:
  Integrator(Scenario scenario, StepControl control);

  /// Integrates up to t_end, applying every impulse with t0 < t_k <= t_end.
  void advance_to(double t_end);
  double time() const { return traj_.t_end(); }
  double state() const { return traj_.end_value(); }
  const Trajectory& trajectory() const { return traj_; }
  Trajectory release() { return std::move(traj_); }
  const Scenario& scenario() const { return scenario_; }
  /// Forgets stored history older than the longest lookback before t.
  void discard_before(double t);

 private:
  double lookback(double t) const;
  double delayed(double lag, Side side) const;
  double field(double t, double x, Side side);
  std::map<double, int> plan_nodes(double lo, double hi) const;
  void step(double t1, bool reuse_slope);

  Scenario scenario_;
  StepControl control_;
  Trajectory traj_;
  std::vector<std::size_t> used_;
  std::vector<double> lags_;
  double tau_bar_ = 0.0;
  double cached_slope_ = 0.0;
};

Trajectory integrate(const Scenario& scenario, const StepControl& control, double t_end);

/// Max |x' + a x - f(t, x_t)| over `grid`, with x' a centered fourth-order
/// difference of the dense output (spacing step/4). Grid points must lie
/// farther than `step` from every breakpoint and jump.
double residual_check(const Trajectory& traj, const Scenario& scenario, std::span<const double> grid, double step);

}  // namespace idde
