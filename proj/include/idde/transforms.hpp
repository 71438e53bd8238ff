#pragma once

#include <memory>
#include <span>
#include <vector>

#include "idde/model.hpp"
#include "idde/trajectory.hpp"

namespace idde {

/// J(u) = u / (u + I(u)). Linear maps give 1 / (1 + b) independently of u.
double j_factor(const ImpulseMap& map, double u);

/// y = F(t) x(t) where F is a left-continuous product of per-impulse factors.
struct TransformedTrajectory {
  Trajectory y;
  /// Impulse instants t_k and the product over all factors with index <= k,
  /// valid on (t_k, t_{k+1}]. Before the first instant the product is 1.
  std::vector<double> instants;
  std::vector<double> products;
  /// Largest |y(t_k+) - y(t_k)| seen during construction.
  double max_jump = 0.0;

  double factor_at(double t) const;
  /// x(t) = y(t) / F(t) (left value at instants).
  double reconstruct(double t) const;
};

/// Continuity certificate: |right - left| <= abs_tol + rel_tol |left|.
struct ContinuityTolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
};

/// Impulse-removing change of variables with products over t_from <= t_k < t.
/// Factors are recomputed from the impulse index range for every interval.
TransformedTrajectory remove_impulses(const Trajectory& x, const ImpulseSchedule& schedule, double t_from = 0.0,
                                      ContinuityTolerance tol = {});

/// max |y' + a y - F(t) f(t, x_t)| on `grid` (centered differences of y with
/// spacing step/4; samples must avoid breakpoints by more than `step`).
double removal_residual(const TransformedTrajectory& tr, const Trajectory& x, const Scenario& scenario,
                        std::span<const double> grid, double step);

/// prod_{k: 0 <= t_k < t} (1 + b_k) for a linear schedule, recomputed from the
/// index range.
double linear_impulse_product(const ImpulseSchedule& schedule, double from, double t);

/// Impulse-free equation for y = prod (1 + b_k)^{-1} x for the Wazewska
/// equation with linear impulses and delays m_i omega. With `nstar` the
/// translated equation (x = N - N*) is reduced, and the history becomes
/// phi - N*.
Scenario linear_impulse_reduction(const Scenario& wazewska, std::shared_ptr<const PeriodicTrajectory> nstar = nullptr);

/// Inverse of the reduction: x(t) = prod_{0 <= t_k < t} (1 + b_k) y(t), with
/// the jumps restored at each instant.
Trajectory undo_linear_reduction(const Trajectory& y, const ImpulseSchedule& schedule);

/// y = N / N* - 1 for linear impulses shared by N and N*. Certifies
/// continuity at every instant and y > -1.
Trajectory ratio_transform(const Trajectory& n, const PeriodicTrajectory& nstar, const ImpulseSchedule& schedule,
                           ContinuityTolerance tol = {});

/// r(t) = (1 / N*(t)) sum b_i(t) exp(-beta_i(t) N*(t - tau_i)).
double ratio_rate(const Scenario& wazewska, const PeriodicTrajectory& nstar, double t);

/// Relative defect of exp(-int_s^t r) against
/// exp(-int_s^t a) N*(s) / N*(t) prod_{s <= t_k < t} (1 + b_k).
double ratio_identity_defect(const Scenario& wazewska, const PeriodicTrajectory& nstar, double s, double t);

}  // namespace idde
