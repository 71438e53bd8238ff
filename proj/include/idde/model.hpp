#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "idde/fn.hpp"
#include "idde/trajectory.hpp"

namespace idde {

/// Default validation density (samples per period) for positivity and
/// monotonicity checks; overridable through IDDE_SEED_GRID.
int default_grid_density();

enum class DelayKind { constant, periodic, multiple };

/// Delay tau(t) >= 0 with non-decreasing lag point d(t) = t - tau(t).
class DelaySpec {
 public:
  static DelaySpec constant(double tau);
  static DelaySpec periodic(Fn tau);
  /// tau = m * omega.
  static DelaySpec multiple(int m, double omega);

  DelayKind kind() const { return kind_; }
  double tau(double t) const;
  double lag_point(double t) const { return t - tau(t); }
  /// Smallest t with d(t) >= xi (first time the lag point reaches xi).
  double lag_preimage(double xi) const;
  /// Exact for constant/multiple delays, sampled otherwise.
  double max_over(double lo, double hi, int density) const;
  double min_over(double lo, double hi, int density) const;
  bool is_zero() const { return kind_ != DelayKind::periodic && value_ == 0.0; }

  double constant_value() const { return value_; }
  int multiple_m() const { return m_; }
  double omega() const { return omega_; }
  const Fn& fn() const { return fn_; }

 private:
  DelayKind kind_ = DelayKind::constant;
  double value_ = 0.0;
  int m_ = 0;
  double omega_ = 0.0;
  Fn fn_;
};

enum class ImpulseKind { linear, affine, tabulated, custom };

/// Impulse map I: u -> jump size.
class ImpulseMap {
 public:
  static ImpulseMap linear(double b);
  static ImpulseMap affine(double c, double b);
  /// Piecewise-linear through (u[j], I[j]) with end slopes extrapolated.
  static ImpulseMap tabulated(std::vector<double> u, std::vector<double> values);
  static ImpulseMap custom(std::function<double(double)> f);

  double operator()(double u) const;
  ImpulseKind kind() const { return kind_; }
  bool is_linear() const { return kind_ == ImpulseKind::linear; }
  /// Slope b for linear and affine maps.
  double slope() const { return b_; }
  double offset() const { return c_; }
  const std::vector<double>& table_u() const { return u_; }
  const std::vector<double>& table_values() const { return v_; }
  /// Exact [min, max] difference quotient when it follows from the
  /// representation (linear, affine, tabulated).
  std::optional<std::pair<double, double>> exact_quotient_bounds() const;

 private:
  ImpulseKind kind_ = ImpulseKind::linear;
  double b_ = 0.0;
  double c_ = 0.0;
  std::vector<double> u_;
  std::vector<double> v_;
  std::function<double(double)> f_;
};

/// Bounds on one impulse. `ratio` holds (a_k, b_k) of the sandwich
/// b_k x^2 <= x (x + I(x)) <= a_k x^2; `quotient` holds (lower, upper)
/// bounds on (I(x) - I(y)) / (x - y) for x, y >= 0.
struct ImpulseBounds {
  std::optional<std::pair<double, double>> ratio;     // (upper a_k, lower b_k)
  std::optional<std::pair<double, double>> quotient;  // (lower, upper)
};

struct Impulse {
  double t = 0.0;  // base instant in (0, omega)
  ImpulseMap map;
  ImpulseBounds bounds;
};

/// Base instants 0 < t_1 < ... < t_p < omega extended by t_{k+p} = t_k + omega,
/// I_{k+p} = I_k. Indices k are 1-based like the extended sequence.
class ImpulseSchedule {
 public:
  ImpulseSchedule() = default;
  ImpulseSchedule(std::vector<Impulse> base, double omega);

  bool empty() const { return base_.empty(); }
  std::size_t p() const { return base_.size(); }
  double omega() const { return omega_; }
  std::span<const Impulse> base() const { return base_; }

  double instant(long k) const;
  const Impulse& impulse(long k) const { return base_[static_cast<std::size_t>((k - 1) % long(p()))]; }
  double apply(long k, double u) const { return impulse(k).map(u); }

  /// Index of the first instant >= t (or > t when `strict`).
  long first_index_at_or_after(double t, bool strict = false) const;
  /// Indices k >= 1 with lo <= t_k < hi (closed/open flags adjustable).
  std::vector<long> indices_in(double lo, double hi, bool include_lo = true, bool include_hi = false) const;

  /// Declared ratio lower bound b_k (H1), falling back to the exact value for
  /// linear maps. Throws when unavailable.
  double ratio_lower(long k) const;
  double ratio_upper(long k) const;
  /// Declared (i1) difference-quotient bounds, exact for linear/affine/tabulated maps.
  double quotient_lower(long k) const;
  double quotient_upper(long k) const;
  bool all_linear() const;

 private:
  std::vector<Impulse> base_;
  double omega_ = 1.0;
};

/// Piecewise-linear scalar map with linearly extrapolated ends.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;
  double operator()(double v) const;
};

struct WazewskaTermSpec {
  Fn b;
  Fn beta;
  std::size_t delay = 0;
};

struct FeedbackTerm {
  std::size_t delay = 0;
  PiecewiseLinear g;
};

enum class RhsKind { zero, wazewska, translated_wazewska, reduced_wazewska, piecewise_linear };

/// Evaluation side for coefficient discontinuities in t.
enum class Side { left, right };

/// The delayed functional f(t, x_t). Every supported kind depends on x only
/// through point values x(t - tau_i(t)), which the caller supplies indexed by
/// delay slot.
class Rhs {
 public:
  static Rhs zero() { return Rhs{}; }
  static Rhs wazewska(std::vector<WazewskaTermSpec> terms);
  /// f(t, phi) = sum b_i e^{-c_i} (e^{-beta_i phi(-tau_i)} - 1), c_i = beta_i N*(t - tau_i).
  static Rhs translated_wazewska(std::vector<WazewskaTermSpec> terms, std::shared_ptr<const PeriodicTrajectory> nstar);
  /// Impulse-free equation obtained by rescaling with the products of
  /// (1 + b_k): coefficients are piecewise constant multiples of b_i, beta_i.
  /// With `nstar` the translated form is produced.
  static Rhs reduced_wazewska(std::vector<WazewskaTermSpec> terms, ImpulseSchedule impulses,
                              std::shared_ptr<const PeriodicTrajectory> nstar = nullptr);
  static Rhs piecewise_linear(std::vector<FeedbackTerm> terms);

  RhsKind kind() const { return kind_; }
  const std::vector<WazewskaTermSpec>& wazewska_terms() const { return wterms_; }
  const std::vector<FeedbackTerm>& feedback_terms() const { return fterms_; }
  const ImpulseSchedule& reduction_impulses() const { return reduction_; }
  const std::shared_ptr<const PeriodicTrajectory>& nstar() const { return nstar_; }

  /// Delay slots that are read.
  std::vector<std::size_t> used_delays() const;
  double eval(double t, std::span<const double> delayed, std::span<const class DelaySpec> delays,
              Side side = Side::left) const;
  /// Instants in [lo, hi] where the coefficients jump.
  std::vector<double> coefficient_breakpoints(double lo, double hi, std::span<const DelaySpec> delays) const;

 private:
  RhsKind kind_ = RhsKind::zero;
  std::vector<WazewskaTermSpec> wterms_;
  std::vector<FeedbackTerm> fterms_;
  ImpulseSchedule reduction_;
  std::shared_ptr<const PeriodicTrajectory> nstar_;
};

/// One Yorke pair per delayed term: -l1 M(phi) <= f_i <= l2 M(-phi).
struct YorkeTerm {
  std::size_t delay = 0;
  Fn lambda1;
  Fn lambda2;
};

struct YorkeBounds {
  std::vector<YorkeTerm> terms;
  bool empty() const { return terms.empty(); }
};

/// Initial data on [t0 - tau_bar, t0]: a closed-form phi(s) evaluated at
/// s = t - t0 <= 0, or an explicit dense trajectory in absolute time.
using HistorySpec = std::variant<Fn, Trajectory>;

struct Scenario {
  std::optional<double> omega;
  double t0 = 0.0;
  Fn damping;
  std::vector<DelaySpec> delays;
  Rhs rhs;
  ImpulseSchedule impulses;
  HistorySpec history = Fn::constant(0.0);
  YorkeBounds yorke;
  /// Whether (H3)(ii) is asserted by the author of the scenario (it cannot be
  /// decided numerically).
  bool assume_h3ii = false;
  int grid_density = 4096;

  /// Maximal delay over one period (or over [t0, t0 + horizon] for
  /// non-periodic delays).
  double tau_bar() const;
  std::vector<double> coefficient_breakpoints(double lo, double hi) const;
};

/// Supremum of all tau_i(t) over [lo, hi].
double max_delay(const Scenario& scenario, double lo, double hi);

/// Checks every type invariant; throws ConfigError naming the field.
void validate(const Scenario& scenario);

}  // namespace idde
