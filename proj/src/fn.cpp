#include "idde/fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "idde/errors.hpp"
#include "idde/quadrature.hpp"

namespace idde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// t reduced into [0, period).
double wrap(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

double trig_value(const Fn::Trig& f, double t) {
  const double phase = kTwoPi * wrap(t, f.period) / f.period;
  double v = f.mean;
  for (std::size_t h = 0; h < f.cos.size(); ++h) v += f.cos[h] * std::cos(double(h + 1) * phase);
  for (std::size_t h = 0; h < f.sin.size(); ++h) v += f.sin[h] * std::sin(double(h + 1) * phase);
  return v;
}

double trig_derivative(const Fn::Trig& f, double t) {
  const double phase = kTwoPi * wrap(t, f.period) / f.period;
  const double w = kTwoPi / f.period;
  double v = 0.0;
  for (std::size_t h = 0; h < f.cos.size(); ++h) v -= f.cos[h] * double(h + 1) * w * std::sin(double(h + 1) * phase);
  for (std::size_t h = 0; h < f.sin.size(); ++h) v += f.sin[h] * double(h + 1) * w * std::cos(double(h + 1) * phase);
  return v;
}

// Antiderivative of the oscillating part, F(t) - mean * t.
double trig_oscillating_primitive(const Fn::Trig& f, double t) {
  const double phase = kTwoPi * wrap(t, f.period) / f.period;
  const double w = kTwoPi / f.period;
  double v = 0.0;
  for (std::size_t h = 0; h < f.cos.size(); ++h) v += f.cos[h] / (double(h + 1) * w) * std::sin(double(h + 1) * phase);
  for (std::size_t h = 0; h < f.sin.size(); ++h) v -= f.sin[h] / (double(h + 1) * w) * std::cos(double(h + 1) * phase);
  return v;
}

struct Cell {
  std::size_t j;
  double frac;
};

Cell tab_cell(const Fn::Tabulated& f, double t) {
  const double cell = f.period / double(f.values.size());
  const double x = wrap(t, f.period) / cell;
  auto j = static_cast<std::size_t>(std::floor(x));
  if (j >= f.values.size()) j = f.values.size() - 1;
  return {j, x - double(j)};
}

double tab_value(const Fn::Tabulated& f, double t) {
  const auto [j, frac] = tab_cell(f, t);
  const double v0 = f.values[j];
  const double v1 = f.values[(j + 1) % f.values.size()];
  return v0 + (v1 - v0) * frac;
}

double tab_derivative(const Fn::Tabulated& f, double t) {
  const auto [j, frac] = tab_cell(f, t);
  (void)frac;
  const double cell = f.period / double(f.values.size());
  return (f.values[(j + 1) % f.values.size()] - f.values[j]) / cell;
}

double tab_primitive(const Fn::Tabulated& f, double t) {
  const std::size_t n = f.values.size();
  const double cell = f.period / double(n);
  double full = 0.0;
  for (std::size_t j = 0; j < n; ++j) full += 0.5 * (f.values[j] + f.values[(j + 1) % n]) * cell;
  const double periods = std::floor(t / f.period);
  const auto [jc, frac] = tab_cell(f, t);
  double partial = 0.0;
  for (std::size_t j = 0; j < jc; ++j) partial += 0.5 * (f.values[j] + f.values[(j + 1) % n]) * cell;
  const double v0 = f.values[jc];
  const double v1 = f.values[(jc + 1) % n];
  partial += cell * frac * (v0 + 0.5 * (v1 - v0) * frac);
  return periods * full + partial;
}

double central_difference(const std::function<double(double)>& f, double t) {
  const double h = 1e-5 * std::max(1.0, std::abs(t));
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

}  // namespace

Fn::Fn(Repr repr) : repr_(std::move(repr)) {}

Fn Fn::trig(double period, double mean, std::vector<double> cos, std::vector<double> sin) {
  if (!(period > 0.0)) throw ConfigError("period", "trigonometric period must be positive");
  return Fn(Trig{period, mean, std::move(cos), std::move(sin)});
}

Fn Fn::tabulated(double period, std::vector<double> values) {
  if (!(period > 0.0)) throw ConfigError("period", "tabulated period must be positive");
  if (values.empty()) throw ConfigError("values", "tabulated function needs at least one sample");
  return Fn(Tabulated{period, std::move(values)});
}

Fn Fn::custom(std::function<double(double)> value, std::function<double(double)> derivative,
              std::optional<double> period) {
  return Fn(Custom{std::move(value), std::move(derivative), period});
}

double Fn::operator()(double t) const {
  return std::visit(overloaded{
                        [](const Constant& f) { return f.value; },
                        [t](const Trig& f) { return trig_value(f, t); },
                        [t](const Tabulated& f) { return tab_value(f, t); },
                        [t](const Rational& f) { return f.c / std::pow(t + f.d, f.n); },
                        [t](const Exponential& f) { return f.c * std::exp(f.k * t); },
                        [t](const ExpReciprocal& f) { return f.c * std::exp(f.k / (t + f.d)); },
                        [t](const Custom& f) { return f.value(t); },
                    },
                    repr_);
}

double Fn::derivative(double t) const {
  return std::visit(overloaded{
                        [](const Constant&) { return 0.0; },
                        [t](const Trig& f) { return trig_derivative(f, t); },
                        [t](const Tabulated& f) { return tab_derivative(f, t); },
                        [t](const Rational& f) { return -f.n * f.c / std::pow(t + f.d, f.n + 1); },
                        [t](const Exponential& f) { return f.k * f.c * std::exp(f.k * t); },
                        [t](const ExpReciprocal& f) {
                          const double u = t + f.d;
                          return -f.k / (u * u) * f.c * std::exp(f.k / u);
                        },
                        [t](const Custom& f) {
                          return f.derivative ? f.derivative(t) : central_difference(f.value, t);
                        },
                    },
                    repr_);
}

double Fn::integral(double lo, double hi) const {
  if (hi == lo) return 0.0;
  return std::visit(
      overloaded{
          [&](const Constant& f) { return f.value * (hi - lo); },
          [&](const Trig& f) {
            return f.mean * (hi - lo) + trig_oscillating_primitive(f, hi) - trig_oscillating_primitive(f, lo);
          },
          [&](const Tabulated& f) { return tab_primitive(f, hi) - tab_primitive(f, lo); },
          [&](const Rational& f) {
            if (f.n == 1) return f.c * std::log((hi + f.d) / (lo + f.d));
            const double e = 1.0 - f.n;
            return f.c / e * (std::pow(hi + f.d, e) - std::pow(lo + f.d, e));
          },
          [&](const Exponential& f) {
            if (f.k == 0.0) return f.c * (hi - lo);
            return f.c / f.k * (std::exp(f.k * hi) - std::exp(f.k * lo));
          },
          [&](const ExpReciprocal&) {
            return quad::adaptive_simpson([this](double s) { return (*this)(s); }, lo, hi, 1e-13);
          },
          [&](const Custom& f) { return quad::adaptive_simpson(f.value, lo, hi, 1e-13); },
      },
      repr_);
}

std::optional<double> Fn::integral_to_infinity() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto sign_inf = [](double v) -> std::optional<double> {
    if (v > 0) return inf;
    if (v < 0) return -inf;
    return std::nullopt;
  };
  return std::visit(overloaded{
                        [&](const Constant& f) -> std::optional<double> {
                          if (f.value == 0.0) return 0.0;
                          return sign_inf(f.value);
                        },
                        [&](const Trig& f) { return sign_inf(f.mean); },
                        [&](const Tabulated& f) {
                          double s = 0;
                          for (double v : f.values) s += v;
                          return sign_inf(s);
                        },
                        [&](const Rational& f) -> std::optional<double> {
                          if (f.n > 1 && f.d > 0) return f.c / ((f.n - 1) * std::pow(f.d, f.n - 1));
                          return sign_inf(f.c);
                        },
                        [&](const Exponential& f) -> std::optional<double> {
                          if (f.k < 0) return -f.c / f.k;
                          return sign_inf(f.c);
                        },
                        [&](const ExpReciprocal& f) { return sign_inf(f.c); },
                        [&](const Custom& f) -> std::optional<double> {
                          if (!f.period) return std::nullopt;
                          return sign_inf(integral(0.0, *f.period));
                        },
                    },
                    repr_);
}

std::optional<double> Fn::period() const {
  return std::visit(overloaded{
                        [](const Trig& f) -> std::optional<double> { return f.period; },
                        [](const Tabulated& f) -> std::optional<double> { return f.period; },
                        [](const Custom& f) { return f.period; },
                        [](const auto&) -> std::optional<double> { return std::nullopt; },
                    },
                    repr_);
}

bool Fn::periodic_with(double omega) const {
  if (is_constant()) return true;
  const auto p = period();
  if (!p) return false;
  const double ratio = omega / *p;
  const double k = std::round(ratio);
  return k >= 1.0 && std::abs(ratio - k) < 1e-9 * k;
}

std::vector<double> Fn::knots(double lo, double hi) const {
  std::vector<double> out;
  if (const auto* f = std::get_if<Tabulated>(&repr_)) {
    const double cell = f->period / double(f->values.size());
    for (double j = std::ceil(lo / cell); j * cell <= hi; j += 1.0) out.push_back(j * cell);
  }
  return out;
}

double Fn::sampled_min(double lo, double hi, int points) const {
  double m = std::numeric_limits<double>::infinity();
  const int n = std::max(points, 2);
  for (int j = 0; j < n; ++j) m = std::min(m, (*this)(lo + (hi - lo) * j / (n - 1)));
  for (double k : knots(lo, hi)) m = std::min(m, (*this)(k));
  return m;
}

double Fn::sampled_max(double lo, double hi, int points) const {
  double m = -std::numeric_limits<double>::infinity();
  const int n = std::max(points, 2);
  for (int j = 0; j < n; ++j) m = std::max(m, (*this)(lo + (hi - lo) * j / (n - 1)));
  for (double k : knots(lo, hi)) m = std::max(m, (*this)(k));
  return m;
}

Fn Fn::scaled(double factor) const {
  return std::visit(overloaded{
                        [&](const Constant& f) { return Fn(Constant{f.value * factor}); },
                        [&](const Trig& f) {
                          Trig g = f;
                          g.mean *= factor;
                          for (double& c : g.cos) c *= factor;
                          for (double& s : g.sin) s *= factor;
                          return Fn(g);
                        },
                        [&](const Tabulated& f) {
                          Tabulated g = f;
                          for (double& v : g.values) v *= factor;
                          return Fn(g);
                        },
                        [&](const Rational& f) { return Fn(Rational{f.c * factor, f.d, f.n}); },
                        [&](const Exponential& f) { return Fn(Exponential{f.c * factor, f.k}); },
                        [&](const ExpReciprocal& f) { return Fn(ExpReciprocal{f.c * factor, f.k, f.d}); },
                        [&](const Custom& f) {
                          auto v = f.value;
                          auto d = f.derivative;
                          std::function<double(double)> sd;
                          if (d) sd = [d, factor](double t) { return factor * d(t); };
                          return Fn(Custom{[v, factor](double t) { return factor * v(t); }, sd, f.period});
                        },
                    },
                    repr_);
}

namespace quad {

namespace {

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol, int max_depth) {
  if (hi == lo) return 0.0;
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_step(f, lo, hi, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace quad

}  // namespace idde
