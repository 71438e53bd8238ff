#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idde/config.hpp"
#include "idde/integrator.hpp"
#include "idde/model.hpp"
#include "idde/trajectory.hpp"

namespace idde {

/// Impulsive Lasota-Wazewska equation
///   N' = -a(t) N + sum_i b_i(t) exp(-beta_i(t) N(t - tau_i(t))),
///   N(t_k+) = N(t_k) + I_k(N(t_k)),
/// with omega-periodic data.
class WazewskaModel {
 public:
  /// Checks the rhs kind, the period, periodicity of every coefficient and
  /// the declared upper impulse products.
  explicit WazewskaModel(Scenario s);

  const Scenario& scenario() const { return s_; }
  double omega() const { return *s_.omega; }
  bool linear_impulses() const { return s_.impulses.empty() || s_.impulses.all_linear(); }
  /// prod (1 + b_k) over one period (linear impulses).
  double period_product() const;
  /// (sum_i max b_i) / min a over one period.
  double default_level() const;

 private:
  Scenario s_;
};

/// Right-hand side of the model (or of the translated equation when
/// `translated`) at t with delayed values indexed by delay slot.
double wazewska_rhs(const Scenario& s, double t, std::span<const double> delayed);

/// Translated equation x' = -a x + sum b_i e^{-beta_i N*(t - tau_i)} (e^{-beta_i x(t - tau_i)} - 1)
/// whose zero solution corresponds to N*. History is x = 0.
Scenario translated_scenario(const WazewskaModel& model, const PeriodicTrajectory& nstar);

struct FinderOptions {
  double tol = 1e-10;
  int max_periods = 10000;
  /// Constant initial level; WazewskaModel::default_level() when unset.
  std::optional<double> n0;
  StepControl step{1e-3};
};

struct PeriodicSolution {
  PeriodicTrajectory nstar;
  /// delta_m = sup |N(t) - N(t - omega)| over period m, m = 2, 3, ...
  std::vector<double> deltas;
  int periods = 0;
  double n0 = 0.0;
  /// Independent recheck of the returned orbit: sup |N(t + omega) - N(t)|
  /// from one more period integrated from it.
  double periodicity_residual = 0.0;
  /// max relative error of N(t_k+) = N(t_k) + I_k(N(t_k)).
  double jump_residual = 0.0;
};

/// Forward iteration of the period map from N = n0 until delta_m < tol.
/// Throws NonConvergenceError with the delta tail when max_periods is reached.
PeriodicSolution find_periodic(const WazewskaModel& model, const FinderOptions& opts = {});

json to_json(const PeriodicSolution& sol);

/// Max over `grid` of |sum_i b_i e^{-beta_i N*(t)} - N*'(t) - a(t) N*(t)|
/// for delays that are multiples of omega; N*' by centered differences.
double equilibrium_residual(const WazewskaModel& model, const PeriodicTrajectory& nstar, std::span<const double> grid);

enum class Oscillation { oscillatory, non_oscillatory, settled };

std::string to_string(Oscillation o);

struct AttractivityRun {
  double scale = 1.0;
  /// e_m = sup over [m omega, (m + 1) omega] of |N - N*|, both jump sides.
  std::vector<double> errors;
  std::optional<int> first_below;
  Oscillation oscillation = Oscillation::settled;
  double final_value = 0.0;
};

struct AttractivityReport {
  double tol = 1e-6;
  int horizon_periods = 200;
  double period = 1.0;
  std::vector<AttractivityRun> runs;
  bool attracting() const;
};

struct VerifyOptions {
  std::vector<double> scales = {0.1, 0.5, 2.0, 10.0};
  int horizon_periods = 200;
  double tol = 1e-6;
  StepControl step{1e-3};
};

/// Runs from history s * N*(t) for each scale s and measures the distance
/// to N* period by period.
AttractivityReport verify_attractivity(const WazewskaModel& model, const PeriodicTrajectory& nstar,
                                       const VerifyOptions& opts = {});

/// Generic form: reference solution `reference` (zero when null), history
/// scaled from the scenario's own history, windows of length `period`.
AttractivityReport verify_attractivity(const Scenario& s, const PeriodicTrajectory* reference, double period,
                                       const VerifyOptions& opts = {});

json to_json(const AttractivityReport& r);

}  // namespace idde
