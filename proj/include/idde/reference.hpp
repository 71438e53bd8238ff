#pragma once

// Brute-force oracles for tests. Nothing here calls the integrator, the
// quadrature helpers or the criteria code.

#include <functional>

#include "idde/criteria.hpp"
#include "idde/model.hpp"
#include "idde/trajectory.hpp"

namespace idde::reference {

struct OracleConfig {
  double euler_step = 1e-4;
  long riemann_panels = 1'000'000;
  /// Most impulse instants a B(t) window may hold.
  long enumeration_cap = 100'000;
};

void validate(const OracleConfig& c);

/// Explicit Euler with linear interpolation of the stored grid for delayed
/// values. Impulses with t0 < t_k <= t_end are applied exactly at t_k.
Trajectory euler_integrate(const Scenario& s, double h, double t_end);

/// max over theta in [-tau, 0] of prod_{t + theta <= t_k < t} 1/b_k, by
/// listing the instants of the window. `factor(k)` gives b_k for the
/// 1-based extended index.
double brute_force_B(const ImpulseSchedule& schedule, double tau, double t, const std::function<double(long)>& factor,
                     long cap = 100'000);

/// Same with b_k read from the declared ratio bounds (exact for linear maps).
double brute_force_B(const ImpulseSchedule& schedule, double tau, double t);

/// Left-Riemann value of one window integral (alpha_j, or sigma for
/// sigma_yan), inner integrals of a as cumulative left sums on the same grid.
double riemann_alpha(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant, int j, double t, long panels,
                     const PeriodicTrajectory* nstar = nullptr, bool alt_lambda2 = false);

/// Root of f on [lo, hi] (sign change required).
double find_root(const std::function<double(double)>& f, double lo, double hi);

}  // namespace idde::reference
