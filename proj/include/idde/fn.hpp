#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace idde {

/// Scalar coefficient function of time.
///
/// Periodic representations (constant, trigonometric polynomial, tabulated
/// samples with linear interpolation) and a small library of non-periodic
/// closed forms, so scenarios stay declarative and serializable. `custom`
/// wraps arbitrary callables for programmatic use; it cannot be serialized.
class Fn {
 public:
  struct Constant {
    double value = 0.0;
  };
  /// mean + sum_h cos[h]*cos(2 pi (h+1) t / period) + sin[h]*sin(2 pi (h+1) t / period)
  struct Trig {
    double period = 1.0;
    double mean = 0.0;
    std::vector<double> cos;
    std::vector<double> sin;
  };
  /// `values[j]` is the value at j * period / n, linearly interpolated and
  /// wrapped periodically.
  struct Tabulated {
    double period = 1.0;
    std::vector<double> values;
  };
  /// c / (t + d)^n
  struct Rational {
    double c = 1.0;
    double d = 1.0;
    int n = 1;
  };
  /// c * exp(k t)
  struct Exponential {
    double c = 1.0;
    double k = 0.0;
  };
  /// c * exp(k / (t + d))
  struct ExpReciprocal {
    double c = 1.0;
    double k = 1.0;
    double d = 1.0;
  };
  struct Custom {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::optional<double> period;
  };

  using Repr = std::variant<Constant, Trig, Tabulated, Rational, Exponential, ExpReciprocal, Custom>;

  Fn() : repr_(Constant{0.0}) {}
  explicit Fn(Repr repr);

  static Fn constant(double v) { return Fn(Constant{v}); }
  static Fn trig(double period, double mean, std::vector<double> cos, std::vector<double> sin);
  static Fn tabulated(double period, std::vector<double> values);
  static Fn rational(double c, double d, int n) { return Fn(Rational{c, d, n}); }
  static Fn exponential(double c, double k) { return Fn(Exponential{c, k}); }
  static Fn exp_reciprocal(double c, double k, double d) { return Fn(ExpReciprocal{c, k, d}); }
  /// When `derivative` is empty a centered difference is used.
  static Fn custom(std::function<double(double)> value,
                   std::function<double(double)> derivative = {},
                   std::optional<double> period = std::nullopt);

  double operator()(double t) const;
  double derivative(double t) const;
  /// Integral over [lo, hi] from the antiderivative where one exists in
  /// closed form, adaptive Simpson otherwise.
  double integral(double lo, double hi) const;
  /// Integral over [0, inf) when it is known: +inf for periodic functions
  /// with positive mean, a finite value for decaying closed forms, nullopt
  /// when it cannot be decided.
  std::optional<double> integral_to_infinity() const;

  /// Natural period if the representation is periodic (constants report none:
  /// they are periodic with every period).
  std::optional<double> period() const;
  bool is_constant() const { return std::holds_alternative<Constant>(repr_); }
  /// True when f(t + omega) == f(t) for all t by construction.
  bool periodic_with(double omega) const;
  bool serializable() const { return !std::holds_alternative<Custom>(repr_); }

  /// Points in [lo, hi] where the derivative may jump (tabulated knots).
  std::vector<double> knots(double lo, double hi) const;

  /// Sampled extrema over [lo, hi] using `points` evenly spaced samples plus knots.
  double sampled_min(double lo, double hi, int points) const;
  double sampled_max(double lo, double hi, int points) const;

  Fn scaled(double factor) const;

  const Repr& repr() const { return repr_; }

 private:
  Repr repr_;
};

}  // namespace idde
