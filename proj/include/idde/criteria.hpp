#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idde/config.hpp"
#include "idde/model.hpp"
#include "idde/trajectory.hpp"

namespace idde {

enum class Verdict { pass, fail, inconclusive };

enum class CriterionId {
  H1,
  H2,
  H3i,
  H5,
  SIGMA_YAN,
  COR2_2,
  LEMMA3_1,
  THM3_1,
  THM3_2,
  THM3_3,
  THM3_4,
  THM3_5,
  THM3_6,
  COR3_2
};

std::string to_string(Verdict v);
std::string to_string(CriterionId id);

/// Values within this distance of a threshold cannot be certified either way.
inline constexpr double kVerdictBand = 1e-9;

/// value < threshold with margin; |value - threshold| <= band is inconclusive.
Verdict strict_less(double value, double threshold, double band = kVerdictBand);

struct CriterionResult {
  CriterionId id = CriterionId::H1;
  std::vector<std::pair<std::string, double>> values;
  double threshold = 1.0;
  Verdict verdict = Verdict::inconclusive;
  /// Whether the remaining hypotheses of the result the criterion belongs to
  /// hold (or are assumed). A passing inequality alone proves nothing when
  /// this is false.
  bool hypotheses_met = true;
  std::string notes;

  double value(const std::string& name) const;
  bool has_value(const std::string& name) const;
  void set(const std::string& name, double v);
  bool established() const { return verdict == Verdict::pass && hypotheses_met; }
};

json to_json(const CriterionResult& r);
json report_to_json(std::span<const CriterionResult> results);
const CriterionResult* find(std::span<const CriterionResult> results, CriterionId id);

// ---- impulse hypotheses ----

/// ratio: sandwich b_k u^2 <= u (u + I(u)) <= a_k u^2 over both signs.
/// quotient: b_k <= (I(x) - I(y)) / (x - y) <= a_k for x, y >= 0.
enum class H1Mode { ratio, quotient };

struct H1Estimate {
  H1Mode mode = H1Mode::ratio;
  /// Per base impulse: grid min and max of the ratio (or difference quotient).
  std::vector<double> lower;
  std::vector<double> upper;
  Verdict verdict = Verdict::inconclusive;
  std::string notes;
};

/// Symmetric geometric grid (ratio mode) or positive geometric grid
/// (quotient mode) over [1e-3, 1e3]; 0 is excluded.
std::vector<double> default_h1_grid(H1Mode mode, int points = 401);

H1Estimate check_h1(const ImpulseSchedule& schedule, std::span<const double> u_grid, H1Mode mode = H1Mode::ratio);

struct ProductClass {
  /// prod_{k=1}^p a_k; P_{np} is its n-th power.
  double period_product = 1.0;
  std::vector<double> partial;
  Verdict bounded = Verdict::pass;
  Verdict convergent = Verdict::pass;
  bool tends_to_zero = false;
};

ProductClass classify_products(std::span<const double> a);

/// Factor sequence read from a schedule: declared ratio bounds (H1) or
/// 1 + difference-quotient bounds (i1).
enum class FactorSource { ratio, quotient };

/// Upper factors a_k (ratio_upper or 1 + quotient_upper) over one period.
std::vector<double> upper_factors(const ImpulseSchedule& schedule, FactorSource source);

/// B(t) = max over theta in [-tau(t), 0] of prod_{t + theta <= t_k < t} 1/b_k,
/// with b_k the lower factor (ratio_lower or 1 + quotient_lower).
double big_B(const ImpulseSchedule& schedule, const DelaySpec& delay, double t,
             FactorSource source = FactorSource::ratio);

// ---- integral criteria ----

enum class AlphaVariant { single, multi, thm3_1, thm3_5, sigma_yan, cor2_2 };

std::string to_string(AlphaVariant v);

struct AlphaOptions {
  /// Start of the sup; defaults to the smallest multiple of omega with
  /// T - tau(T) >= 0 (tau_bar for non-periodic data).
  std::optional<double> T;
  int grid_points = 1024;
  /// Sup window length for scenarios without a period.
  double horizon = 50.0;
  /// Exponential-slope lambda_2 for the Wazewska bounds instead of beta_i b_i.
  bool alt_lambda2 = false;
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
};

/// Window integrand for one variant. `j` is 1 or 2 (ignored by sigma_yan).
/// thm3_1 and thm3_5 need `nstar`; the Yorke bounds for thm3_1 are built from
/// the Wazewska terms.
double alpha_at(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant, int j, double t,
                const PeriodicTrajectory* nstar = nullptr, const AlphaOptions& opts = {});

/// T rule shared by every variant.
double alpha_start(const Scenario& s, const AlphaOptions& opts);

/// Evaluates the variant's quantity, its sup over t and the verdict. Values:
/// alpha1, alpha2, alpha1_alpha2, t_sup1, t_sup2, T (multi/single/thm3_x);
/// sigma, t_sup (sigma_yan); c1, c2, A, value (cor2_2).
CriterionResult alpha_integrals(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant,
                                const PeriodicTrajectory* nstar = nullptr, const AlphaOptions& opts = {});

/// lambda_{1,i} = beta_i b_i e^{-beta_i N*(t - tau_i)} and
/// lambda_{2,i} = beta_i b_i, or the exponential-slope alternative
/// (e^{overline{beta N*}} - 1) / overline{N*} * b_i e^{-beta_i N*(t - tau_i)}.
YorkeBounds wazewska_yorke(const Scenario& s, const PeriodicTrajectory& nstar, bool alt_lambda2 = false);

// ---- reports ----

/// H1, H2, H3i, H5, SIGMA_YAN and COR2_2 for an equation with a
/// zero equilibrium and declared Yorke bounds.
std::vector<CriterionResult> check_zero_criteria(const Scenario& s, const AlphaOptions& opts = {});

/// Closed-form and pointwise conditions for the Wazewska model: LEMMA3_1,
/// THM3_2, THM3_3, THM3_4, THM3_6 and COR3_2.
std::vector<CriterionResult> closed_form_conditions(const Scenario& wazewska, const PeriodicTrajectory& nstar,
                                                    const AlphaOptions& opts = {});

/// Full Wazewska report: impulse hypotheses in difference-quotient form, the
/// THM3_1 and THM3_5 integrals, and the closed forms.
std::vector<CriterionResult> check_wazewska_criteria(const Scenario& wazewska, const PeriodicTrajectory& nstar,
                                                     const AlphaOptions& opts = {});

/// True when some passing criterion together with its hypotheses proves
/// global attractivity of the reference solution.
bool attractivity_established(std::span<const CriterionResult> results);

}  // namespace idde
