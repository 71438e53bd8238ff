#include "idde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include <boost/math/tools/roots.hpp>

#include "idde/errors.hpp"
#include "idde/integrator.hpp"

namespace idde::reference {

namespace {

// Every instant of the extended sequence in [lo, hi), oldest first.
std::vector<std::pair<double, std::size_t>> instants_between(const ImpulseSchedule& s, double lo, double hi,
                                                             long cap) {
  std::vector<std::pair<double, std::size_t>> out;
  if (s.empty()) return out;
  const double w = s.omega();
  long n = std::max(0L, static_cast<long>(std::floor(lo / w)) - 1);
  for (;; ++n) {
    bool past = false;
    for (std::size_t j = 0; j < s.p(); ++j) {
      const double tk = s.base()[j].t + n * w;
      if (tk >= hi) {
        past = true;
        break;
      }
      if (tk >= lo) out.emplace_back(tk, j);
    }
    if (past) break;
    if (static_cast<long>(out.size()) > cap) throw NumericError("too many impulse instants in one window");
  }
  return out;
}

double ratio_factor(const Impulse& imp) {
  if (imp.bounds.ratio) return imp.bounds.ratio->second;
  if (imp.map.is_linear()) return 1.0 + imp.map.slope();
  throw ConfigError("impulses", "no declared ratio bound");
}

double quotient_factor(const Impulse& imp) {
  if (imp.bounds.quotient) return 1.0 + imp.bounds.quotient->first;
  if (imp.map.is_linear() || imp.map.kind() == ImpulseKind::affine) return 1.0 + imp.map.slope();
  if (imp.map.kind() == ImpulseKind::tabulated) {
    const auto& u = imp.map.table_u();
    const auto& v = imp.map.table_values();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < u.size(); ++i) lo = std::min(lo, (v[i + 1] - v[i]) / (u[i + 1] - u[i]));
    return 1.0 + lo;
  }
  throw ConfigError("impulses", "no declared quotient bound");
}

double history_value(const Scenario& s, double t) {
  if (const Fn* f = std::get_if<Fn>(&s.history)) return (*f)(t - s.t0);
  return std::get<Trajectory>(s.history).eval(t);
}

}  // namespace

void validate(const OracleConfig& c) {
  if (!(c.euler_step > 0.0)) throw ConfigError("euler_step", "must be positive");
  if (c.riemann_panels <= 0) throw ConfigError("riemann_panels", "must be positive");
  if (c.enumeration_cap <= 0) throw ConfigError("enumeration_cap", "must be positive");
}

Trajectory euler_integrate(const Scenario& s, double h, double t_end) {
  if (!(h > 0.0)) throw ConfigError("h", "step must be positive");
  std::vector<double> ts = {s.t0};
  std::vector<double> xs = {history_value(s, s.t0)};
  const auto jumps = instants_between(s.impulses, std::nextafter(s.t0, t_end + 1.0), std::nextafter(t_end, t_end + 1.0),
                                      1'000'000'000L);
  // Left value at a jump comes first, so lower_bound picks it.
  auto lookup = [&](double lag) {
    if (lag <= s.t0) return history_value(s, lag);
    const auto it = std::lower_bound(ts.begin(), ts.end(), lag);
    if (it == ts.end()) return xs.back();
    const std::size_t i = static_cast<std::size_t>(it - ts.begin());
    if (*it == lag) return xs[i];
    return xs[i - 1] + (xs[i] - xs[i - 1]) * (lag - ts[i - 1]) / (ts[i] - ts[i - 1]);
  };
  std::vector<double> delayed(s.delays.size());
  auto slope = [&](double t, double x) {
    for (std::size_t i = 0; i < s.delays.size(); ++i) delayed[i] = lookup(t - s.delays[i].tau(t));
    return -s.damping(t) * x + s.rhs.eval(t, delayed, s.delays);
  };

  Trajectory out(s.t0, xs[0]);
  std::size_t next_jump = 0;
  long n = 0;
  double t = s.t0;
  double x = xs[0];
  while (t < t_end) {
    double t1 = std::min(s.t0 + (n + 1) * h, t_end);
    bool at_jump = false;
    if (next_jump < jumps.size() && jumps[next_jump].first <= t1 + 1e-12 * h) {
      t1 = jumps[next_jump].first;
      at_jump = true;
    }
    if (t1 > t) {
      const double x1 = x + (t1 - t) * slope(t, x);
      if (!std::isfinite(x1) || std::abs(x1) > kDivergenceBound) throw DivergenceError(t1, std::abs(x1));
      const double d = (x1 - x) / (t1 - t);
      out.append({t, t1, x, x1, d, d});
      ts.push_back(t1);
      xs.push_back(x1);
      x = x1;
    }
    if (t1 >= s.t0 + (n + 1) * h - 1e-12 * h) ++n;
    t = t1;
    if (at_jump) {
      x += s.impulses.base()[jumps[next_jump].second].map(x);
      out.add_jump(x);
      ts.push_back(t);
      xs.push_back(x);
      ++next_jump;
    }
  }
  return out;
}

double brute_force_B(const ImpulseSchedule& schedule, double tau, double t, const std::function<double(long)>& factor,
                     long cap) {
  const auto window = instants_between(schedule, t - tau, t, cap);
  std::vector<double> suffix = {1.0};
  for (std::size_t start = 0; start < window.size(); ++start) {
    double prod = 1.0;
    for (std::size_t i = start; i < window.size(); ++i) {
      const long k = static_cast<long>(std::lround((window[i].first - schedule.base()[window[i].second].t) /
                                                   schedule.omega())) *
                         static_cast<long>(schedule.p()) +
                     static_cast<long>(window[i].second) + 1;
      prod *= 1.0 / factor(k);
    }
    suffix.push_back(prod);
  }
  return *std::max_element(suffix.begin(), suffix.end());
}

double brute_force_B(const ImpulseSchedule& schedule, double tau, double t) {
  return brute_force_B(schedule, tau, t, [&](long k) { return ratio_factor(schedule.base()[(k - 1) % schedule.p()]); });
}

double riemann_alpha(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant, int j, double t, long panels,
                     const PeriodicTrajectory* nstar, bool alt_lambda2) {
  if (panels <= 0) throw ConfigError("panels", "must be positive");
  const bool waz = variant == AlphaVariant::thm3_1 || variant == AlphaVariant::thm3_5;
  if (waz && !nstar) throw ConfigError("nstar", "needed for this variant");
  const auto& terms = s.rhs.wazewska_terms();
  const ImpulseSchedule& imp = s.impulses;
  auto quotient = [&](long k) { return quotient_factor(imp.base()[(k - 1) % imp.p()]); };
  auto ratio = [&](long k) { return ratio_factor(imp.base()[(k - 1) % imp.p()]); };

  // Delays of the terms and the window length.
  std::vector<std::size_t> dl;
  if (waz) {
    for (const auto& term : terms) dl.push_back(term.delay);
  } else {
    for (const auto& y : bounds.terms) dl.push_back(y.delay);
  }
  auto tau_max = [&](double x) {
    double v = 0.0;
    for (std::size_t d : dl) v = std::max(v, s.delays[d].tau(x));
    return v;
  };
  double window = tau_max(t);
  if (variant == AlphaVariant::thm3_5) {
    int m = 0;
    for (std::size_t d : dl) m = std::max(m, s.delays[d].multiple_m());
    window = m * *s.omega;
  }
  const double lo = t - window;
  const double h = window / panels;

  // Alternative lambda_2 scale from a dense look at one period.
  double scale = 0.0;
  if (variant == AlphaVariant::thm3_1 && alt_lambda2) {
    double nbar = nstar->max_value();
    double bn = 0.0;
    const double w = *s.omega;
    for (int i = 0; i <= 4096; ++i) {
      const double x = w * i / 4096;
      for (const auto& term : terms) bn = std::max({bn, term.beta(x) * (*nstar)(x), term.beta(x) * nstar->right_limit(x)});
    }
    for (const Impulse& p : imp.base()) {
      for (const auto& term : terms) bn = std::max({bn, term.beta(p.t) * (*nstar)(p.t), term.beta(p.t) * nstar->right_limit(p.t)});
    }
    scale = std::expm1(bn) / nbar;
  }

  std::vector<double> a(static_cast<std::size_t>(panels));
  for (long i = 0; i < panels; ++i) a[i] = s.damping(lo + i * h);
  // tail[i] ~ int_{s_i}^t a, head[i] ~ int_lo^{s_i} a
  std::vector<double> tail(static_cast<std::size_t>(panels) + 1, 0.0);
  for (long i = panels - 1; i >= 0; --i) tail[i] = tail[i + 1] + h * a[i];
  double head = 0.0;

  double sum = 0.0;
  for (long i = 0; i < panels; ++i) {
    const double x = lo + i * h;
    double g = 0.0;
    switch (variant) {
      case AlphaVariant::single: {
        double lam = 0.0;
        for (const auto& y : bounds.terms) lam += j == 1 ? y.lambda1(x) : y.lambda2(x);
        g = lam * (imp.empty() ? 1.0 : brute_force_B(imp, tau_max(x), x, ratio)) * std::exp(-tail[i]);
        break;
      }
      case AlphaVariant::sigma_yan: {
        double lam = 0.0;
        for (const auto& y : bounds.terms) lam += y.lambda2(x);
        g = lam * (imp.empty() ? 1.0 : brute_force_B(imp, tau_max(x), x, ratio)) * std::exp(head);
        break;
      }
      case AlphaVariant::multi:
      case AlphaVariant::cor2_2:
        for (const auto& y : bounds.terms) {
          const double B = imp.empty() ? 1.0 : brute_force_B(imp, s.delays[y.delay].tau(x), x, ratio);
          g += (j == 1 ? y.lambda1(x) : y.lambda2(x)) * B;
        }
        g *= std::exp(-tail[i]);
        break;
      case AlphaVariant::thm3_1:
        for (const auto& term : terms) {
          const double lag = x - s.delays[term.delay].tau(x);
          const double damped = term.b(x) * std::exp(-term.beta(x) * (*nstar)(lag));
          double lam;
          if (j == 1) {
            lam = term.beta(x) * damped;
          } else {
            lam = alt_lambda2 ? scale * damped : term.beta(x) * term.b(x);
          }
          const double B = imp.empty() ? 1.0 : brute_force_B(imp, s.delays[term.delay].tau(x), x, quotient);
          g += lam * B;
        }
        g *= std::exp(-tail[i]);
        break;
      case AlphaVariant::thm3_5: {
        const double n = (*nstar)(x);
        for (const auto& term : terms) {
          double v = term.b(x) * term.beta(x) * n;
          if (j == 1) v *= std::exp(-term.beta(x) * n);
          g += v;
        }
        double prod = 1.0;
        for (const auto& [tk, idx] : instants_between(imp, x, t, 1'000'000)) prod *= 1.0 + imp.base()[idx].map.slope();
        g *= prod * std::exp(-tail[i]);
        break;
      }
    }
    sum += h * g;
    head += h * a[i];
  }
  if (variant == AlphaVariant::thm3_5) sum /= (*nstar)(t);
  return sum;
}

double find_root(const std::function<double(double)>& f, double lo, double hi) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw NumericError("find_root: no sign change on the bracket");
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(), iters);
  return 0.5 * (a + b);
}

}  // namespace idde::reference
