#include "idde/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "idde/errors.hpp"

namespace idde {

int default_grid_density() {
  if (const char* env = std::getenv("IDDE_SEED_GRID")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 16 && v <= (1L << 24)) return static_cast<int>(v);
  }
  return 4096;
}

// ---- delays ----

DelaySpec DelaySpec::constant(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("delays.tau", "constant delay must be finite and >= 0");
  DelaySpec d;
  d.kind_ = DelayKind::constant;
  d.value_ = tau;
  return d;
}

DelaySpec DelaySpec::periodic(Fn tau) {
  DelaySpec d;
  d.kind_ = DelayKind::periodic;
  d.fn_ = std::move(tau);
  return d;
}

DelaySpec DelaySpec::multiple(int m, double omega) {
  if (m < 1) throw ConfigError("delays.m", "multiple must be a positive integer");
  if (!(omega > 0.0)) throw ConfigError("omega", "multiple-of-omega delay needs omega > 0");
  DelaySpec d;
  d.kind_ = DelayKind::multiple;
  d.m_ = m;
  d.omega_ = omega;
  d.value_ = m * omega;
  return d;
}

double DelaySpec::tau(double t) const { return kind_ == DelayKind::periodic ? fn_(t) : value_; }

double DelaySpec::lag_preimage(double xi) const {
  if (kind_ != DelayKind::periodic) return xi + value_;
  // d(t) = t - tau(t) is non-decreasing, so bracket with the delay range.
  const double span = fn_.period().value_or(1.0);
  double lo = xi + min_over(xi, xi + span, 512) - 1e-9;
  double hi = xi + max_over(xi, xi + 2 * span, 512) + 1e-9;
  while (lag_point(lo) >= xi) lo -= span;
  while (lag_point(hi) < xi) hi += span;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (lag_point(mid) >= xi) hi = mid; else lo = mid;
  }
  return hi;
}

double DelaySpec::max_over(double lo, double hi, int density) const {
  if (kind_ != DelayKind::periodic) return value_;
  const double period = fn_.period().value_or(1.0);
  const int points = std::max(density, static_cast<int>(std::ceil((hi - lo) / period * density)) + 1);
  return fn_.sampled_max(lo, hi, points);
}

double DelaySpec::min_over(double lo, double hi, int density) const {
  if (kind_ != DelayKind::periodic) return value_;
  const double period = fn_.period().value_or(1.0);
  const int points = std::max(density, static_cast<int>(std::ceil((hi - lo) / period * density)) + 1);
  return fn_.sampled_min(lo, hi, points);
}

// ---- impulse maps ----

ImpulseMap ImpulseMap::linear(double b) {
  ImpulseMap m;
  m.kind_ = ImpulseKind::linear;
  m.b_ = b;
  return m;
}

ImpulseMap ImpulseMap::affine(double c, double b) {
  ImpulseMap m;
  m.kind_ = ImpulseKind::affine;
  m.b_ = b;
  m.c_ = c;
  return m;
}

ImpulseMap ImpulseMap::tabulated(std::vector<double> u, std::vector<double> values) {
  if (u.size() < 2 || u.size() != values.size()) {
    throw ConfigError("impulses.params", "tabulated impulse needs >= 2 matching (u, I) pairs");
  }
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (!(u[i] > u[i - 1])) throw ConfigError("impulses.params.u", "abscissae must be strictly increasing");
  }
  ImpulseMap m;
  m.kind_ = ImpulseKind::tabulated;
  m.u_ = std::move(u);
  m.v_ = std::move(values);
  return m;
}

ImpulseMap ImpulseMap::custom(std::function<double(double)> f) {
  ImpulseMap m;
  m.kind_ = ImpulseKind::custom;
  m.f_ = std::move(f);
  return m;
}

double PiecewiseLinear::operator()(double v) const {
  const std::size_t n = x.size();
  if (n == 1) return y[0];
  std::size_t j;
  if (v <= x.front()) {
    j = 0;
  } else if (v >= x.back()) {
    j = n - 2;
  } else {
    j = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), v) - x.begin()) - 1;
  }
  const double w = (v - x[j]) / (x[j + 1] - x[j]);
  return y[j] + w * (y[j + 1] - y[j]);
}

double ImpulseMap::operator()(double u) const {
  switch (kind_) {
    case ImpulseKind::linear: return b_ * u;
    case ImpulseKind::affine: return c_ + b_ * u;
    case ImpulseKind::tabulated: return PiecewiseLinear{u_, v_}(u);
    case ImpulseKind::custom: return f_(u);
  }
  return 0.0;
}

std::optional<std::pair<double, double>> ImpulseMap::exact_quotient_bounds() const {
  switch (kind_) {
    case ImpulseKind::linear:
    case ImpulseKind::affine: return std::pair{b_, b_};
    case ImpulseKind::tabulated: {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 1; i < u_.size(); ++i) {
        const double s = (v_[i] - v_[i - 1]) / (u_[i] - u_[i - 1]);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      return std::pair{lo, hi};
    }
    case ImpulseKind::custom: return std::nullopt;
  }
  return std::nullopt;
}

// ---- schedule ----

ImpulseSchedule::ImpulseSchedule(std::vector<Impulse> base, double omega) : base_(std::move(base)), omega_(omega) {
  if (base_.empty()) return;
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("omega", "impulses need a positive period");
  for (std::size_t i = 0; i < base_.size(); ++i) {
    const double t = base_[i].t;
    if (!(t > 0.0 && t < omega)) throw ConfigError("impulses[" + std::to_string(i) + "].t", "instant must lie in (0, omega)");
    if (i > 0 && !(t > base_[i - 1].t)) {
      throw ConfigError("impulses[" + std::to_string(i) + "].t", "instants must be strictly increasing");
    }
  }
}

double ImpulseSchedule::instant(long k) const {
  const long p_ = static_cast<long>(p());
  const long j = (k - 1) / p_;
  return base_[static_cast<std::size_t>((k - 1) % p_)].t + static_cast<double>(j) * omega_;
}

long ImpulseSchedule::first_index_at_or_after(double t, bool strict) const {
  auto before = [&](long k) { return strict ? instant(k) <= t : instant(k) < t; };
  const long p_ = static_cast<long>(p());
  const double periods = std::floor(t / omega_);
  long k = periods <= 0.0 ? 1 : static_cast<long>(periods) * p_ + 1;
  while (k > 1 && !before(k - 1)) --k;
  while (before(k)) ++k;
  return k;
}

std::vector<long> ImpulseSchedule::indices_in(double lo, double hi, bool include_lo, bool include_hi) const {
  std::vector<long> out;
  if (empty() || hi < lo) return out;
  for (long k = first_index_at_or_after(lo, !include_lo);; ++k) {
    const double tk = instant(k);
    if (tk > hi || (tk == hi && !include_hi)) break;
    out.push_back(k);
  }
  return out;
}

double ImpulseSchedule::ratio_lower(long k) const {
  const Impulse& imp = impulse(k);
  if (imp.bounds.ratio) return imp.bounds.ratio->second;
  if (imp.map.is_linear()) return 1.0 + imp.map.slope();
  throw ConfigError("impulses.ratio_bounds", "ratio bounds (a_k, b_k) not declared for a non-linear impulse");
}

double ImpulseSchedule::ratio_upper(long k) const {
  const Impulse& imp = impulse(k);
  if (imp.bounds.ratio) return imp.bounds.ratio->first;
  if (imp.map.is_linear()) return 1.0 + imp.map.slope();
  throw ConfigError("impulses.ratio_bounds", "ratio bounds (a_k, b_k) not declared for a non-linear impulse");
}

double ImpulseSchedule::quotient_lower(long k) const {
  const Impulse& imp = impulse(k);
  if (imp.bounds.quotient) return imp.bounds.quotient->first;
  if (auto q = imp.map.exact_quotient_bounds()) return q->first;
  throw ConfigError("impulses.quotient_bounds", "difference-quotient bounds not declared for a custom impulse");
}

double ImpulseSchedule::quotient_upper(long k) const {
  const Impulse& imp = impulse(k);
  if (imp.bounds.quotient) return imp.bounds.quotient->second;
  if (auto q = imp.map.exact_quotient_bounds()) return q->second;
  throw ConfigError("impulses.quotient_bounds", "difference-quotient bounds not declared for a custom impulse");
}

bool ImpulseSchedule::all_linear() const {
  return std::all_of(base_.begin(), base_.end(), [](const Impulse& i) { return i.map.is_linear(); });
}

// ---- right-hand side ----

Rhs Rhs::wazewska(std::vector<WazewskaTermSpec> terms) {
  Rhs r;
  r.kind_ = RhsKind::wazewska;
  r.wterms_ = std::move(terms);
  return r;
}

Rhs Rhs::translated_wazewska(std::vector<WazewskaTermSpec> terms, std::shared_ptr<const PeriodicTrajectory> nstar) {
  if (!nstar) throw ConfigError("rhs.nstar", "translated form needs a periodic solution");
  Rhs r;
  r.kind_ = RhsKind::translated_wazewska;
  r.wterms_ = std::move(terms);
  r.nstar_ = std::move(nstar);
  return r;
}

Rhs Rhs::reduced_wazewska(std::vector<WazewskaTermSpec> terms, ImpulseSchedule impulses,
                          std::shared_ptr<const PeriodicTrajectory> nstar) {
  if (!impulses.all_linear()) throw ConfigError("impulses", "reduction needs linear impulses I_k(u) = b_k u");
  for (const Impulse& imp : impulses.base()) {
    if (!(imp.map.slope() > -1.0)) throw ConfigError("impulses.params.b", "reduction needs b_k > -1");
  }
  Rhs r;
  r.kind_ = RhsKind::reduced_wazewska;
  r.wterms_ = std::move(terms);
  r.reduction_ = std::move(impulses);
  r.nstar_ = std::move(nstar);
  return r;
}

Rhs Rhs::piecewise_linear(std::vector<FeedbackTerm> terms) {
  for (const FeedbackTerm& term : terms) {
    const auto& g = term.g;
    if (g.x.empty() || g.x.size() != g.y.size()) throw ConfigError("rhs.terms", "breakpoints and values must match");
    for (std::size_t i = 1; i < g.x.size(); ++i) {
      if (!(g.x[i] > g.x[i - 1])) throw ConfigError("rhs.terms.breakpoints", "must be strictly increasing");
    }
  }
  Rhs r;
  r.kind_ = RhsKind::piecewise_linear;
  r.fterms_ = std::move(terms);
  return r;
}

std::vector<std::size_t> Rhs::used_delays() const {
  std::vector<std::size_t> out;
  for (const auto& t : wterms_) out.push_back(t.delay);
  for (const auto& t : fterms_) out.push_back(t.delay);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

// prod_{k: 0 <= t_k < t} (1 + b_k) for linear impulses; at t == t_k the
// right side includes t_k itself.
double linear_product(const ImpulseSchedule& s, double t, Side side) {
  double prod = 1.0;
  if (s.empty()) return prod;
  // t - m omega can miss an instant by a few ulp; snap onto it.
  const double eps = 1e-12 * std::max(1.0, std::abs(t));
  const long near = s.first_index_at_or_after(t - eps);
  if (s.instant(near) <= t + eps) t = s.instant(near);
  for (long k : s.indices_in(0.0, t, true, side == Side::right)) prod *= 1.0 + s.impulse(k).map.slope();
  return prod;
}

// N*(lag) on the requested side, with lags within a few ulp of an N* jump
// read at that jump.
double nstar_at(const PeriodicTrajectory& nstar, double lag, Side side) {
  const double w = nstar.omega();
  const double eps = 1e-12 * std::max(1.0, std::abs(lag));
  for (const Jump& j : nstar.period().jumps()) {
    const double shift = std::round((lag - j.t) / w) * w;
    if (std::abs(j.t + shift - lag) <= eps) return side == Side::right ? j.right : j.left;
  }
  return side == Side::right ? nstar.right_limit(lag) : nstar(lag);
}

}  // namespace

double Rhs::eval(double t, std::span<const double> delayed, std::span<const DelaySpec> delays, Side side) const {
  double sum = 0.0;
  switch (kind_) {
    case RhsKind::zero: return 0.0;
    case RhsKind::wazewska:
      for (const auto& term : wterms_) sum += term.b(t) * std::exp(-term.beta(t) * delayed[term.delay]);
      return sum;
    case RhsKind::translated_wazewska:
      for (const auto& term : wterms_) {
        const double lag = delays[term.delay].lag_point(t);
        const double n = nstar_at(*nstar_, lag, side);
        const double beta = term.beta(t);
        sum += term.b(t) * std::exp(-beta * n) * std::expm1(-beta * delayed[term.delay]);
      }
      return sum;
    case RhsKind::reduced_wazewska: {
      const double down = 1.0 / linear_product(reduction_, t, side);
      for (const auto& term : wterms_) {
        const double lag = delays[term.delay].lag_point(t);
        const double bt = term.b(t) * down;
        const double betat = term.beta(t) * linear_product(reduction_, lag, side);
        if (nstar_) {
          const double n = nstar_at(*nstar_, lag, side);
          sum += bt * std::exp(-term.beta(t) * n) * std::expm1(-betat * delayed[term.delay]);
        } else {
          sum += bt * std::exp(-betat * delayed[term.delay]);
        }
      }
      return sum;
    }
    case RhsKind::piecewise_linear:
      for (const auto& term : fterms_) sum += term.g(delayed[term.delay]);
      return sum;
  }
  return sum;
}

std::vector<double> Rhs::coefficient_breakpoints(double lo, double hi, std::span<const DelaySpec> delays) const {
  std::vector<double> out;
  auto add_fn_knots = [&](const Fn& f) {
    for (double k : f.knots(lo, hi)) out.push_back(k);
  };
  for (const auto& term : wterms_) {
    add_fn_knots(term.b);
    add_fn_knots(term.beta);
  }
  if (kind_ == RhsKind::reduced_wazewska && !reduction_.empty()) {
    std::vector<double> own;
    for (long k : reduction_.indices_in(lo, hi, true, true)) own.push_back(reduction_.instant(k));
    out.insert(out.end(), own.begin(), own.end());
    for (const auto& term : wterms_) {
      const DelaySpec& d = delays[term.delay];
      for (long k : reduction_.indices_in(d.lag_point(lo) - 1e-9, d.lag_point(hi) + 1e-9, true, true)) {
        double tb = d.lag_preimage(reduction_.instant(k));
        // A lagged instant that is itself an instant keeps the exact value.
        for (double t : own) {
          if (std::abs(t - tb) <= 1e-10 * std::max(1.0, std::abs(t))) tb = t;
        }
        if (tb >= lo && tb <= hi) out.push_back(tb);
      }
    }
  }
  if (nstar_ && (kind_ == RhsKind::translated_wazewska || kind_ == RhsKind::reduced_wazewska)) {
    // N* jumps at its own impulse instants, seen through each lag.
    const double w = nstar_->omega();
    std::vector<double> nodes;
    for (const Jump& j : nstar_->period().jumps()) nodes.push_back(j.t);
    for (const auto& term : wterms_) {
      const DelaySpec& d = delays[term.delay];
      const double a = d.lag_point(lo);
      const double b = d.lag_point(hi);
      for (double node : nodes) {
        for (double base = std::floor(a / w) * w; base <= b + w; base += w) {
          const double xi = base + node;
          if (xi < a || xi > b) continue;
          const double tb = d.lag_preimage(xi);
          if (tb >= lo && tb <= hi) out.push_back(tb);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---- scenario ----

double Scenario::tau_bar() const {
  const double span = omega.value_or(1.0);
  return max_delay(*this, t0, t0 + span);
}

std::vector<double> Scenario::coefficient_breakpoints(double lo, double hi) const {
  std::vector<double> out = rhs.coefficient_breakpoints(lo, hi, delays);
  for (double k : damping.knots(lo, hi)) out.push_back(k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double max_delay(const Scenario& scenario, double lo, double hi) {
  if (!(hi >= lo)) throw ConfigError("window", "max_delay needs a nonempty window");
  double best = 0.0;
  for (const DelaySpec& d : scenario.delays) best = std::max(best, d.max_over(lo, hi, scenario.grid_density));
  return best;
}

namespace {

// Samples a function over a period (or a fallback window) and reports the
// first violation of `ok`.
template <class F, class P>
void check_grid(const std::string& field, F f, double lo, double hi, int n, P ok, const char* what) {
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    const double v = f(t);
    if (!std::isfinite(v) || !ok(v)) {
      throw ConfigError(field, std::string(what) + " violated at t=" + std::to_string(t) + " (value " +
                                   std::to_string(v) + ")");
    }
  }
}

bool needs_zero_equilibrium(const Rhs& rhs) {
  switch (rhs.kind()) {
    case RhsKind::wazewska: return false;
    case RhsKind::reduced_wazewska: return rhs.nstar() != nullptr;
    default: return true;
  }
}

}  // namespace

void validate(const Scenario& s) {
  const int n = s.grid_density;
  if (n < 16) throw ConfigError("grid_density", "must be >= 16");
  if (s.omega && !(*s.omega > 0.0)) throw ConfigError("omega", "must be positive");
  const double span = s.omega.value_or(s.damping.period().value_or(100.0));
  const double lo = s.t0;
  const double hi = s.t0 + span;

  check_grid("damping", s.damping, lo, hi, n, [](double v) { return v >= 0.0; }, "a(t) >= 0");

  for (std::size_t i = 0; i < s.delays.size(); ++i) {
    const DelaySpec& d = s.delays[i];
    const std::string field = "delays[" + std::to_string(i) + "]";
    if (d.kind() != DelayKind::periodic) continue;
    const double per = d.fn().period().value_or(span);
    check_grid(field, [&](double t) { return d.tau(t); }, lo, lo + per, n, [](double v) { return v >= 0.0; },
               "tau(t) >= 0");
    double prev = d.lag_point(lo);
    for (int j = 1; j <= n; ++j) {
      const double t = lo + per * j / n;
      const double cur = d.lag_point(t);
      if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
        throw ConfigError(field, "t - tau(t) must be non-decreasing (fails near t=" + std::to_string(t) + ")");
      }
      prev = cur;
    }
  }

  for (std::size_t d : s.rhs.used_delays()) {
    if (d >= s.delays.size()) throw ConfigError("rhs.terms.delay", "delay index " + std::to_string(d) + " out of range");
  }
  for (std::size_t i = 0; i < s.rhs.wazewska_terms().size(); ++i) {
    const auto& term = s.rhs.wazewska_terms()[i];
    const std::string field = "rhs.terms[" + std::to_string(i) + "]";
    check_grid(field + ".b", term.b, lo, hi, n, [](double v) { return v > 0.0; }, "b_i(t) > 0");
    check_grid(field + ".beta", term.beta, lo, hi, n, [](double v) { return v > 0.0; }, "beta_i(t) > 0");
  }

  if (!s.impulses.empty()) {
    if (!s.omega) throw ConfigError("omega", "impulses need omega");
    if (s.impulses.omega() != *s.omega) throw ConfigError("impulses", "schedule period differs from omega");
    const bool zero_eq = needs_zero_equilibrium(s.rhs);
    for (std::size_t i = 0; i < s.impulses.p(); ++i) {
      const Impulse& imp = s.impulses.base()[i];
      const std::string field = "impulses[" + std::to_string(i) + "]";
      if (imp.bounds.ratio) {
        if (!(imp.bounds.ratio->second > 0.0)) throw ConfigError(field + ".ratio_bounds", "b_k must be > 0");
        if (imp.bounds.ratio->first < imp.bounds.ratio->second) {
          throw ConfigError(field + ".ratio_bounds", "a_k must be >= b_k");
        }
      }
      if (imp.bounds.quotient && !(imp.bounds.quotient->first > -1.0)) {
        throw ConfigError(field + ".quotient_bounds", "difference-quotient lower bound must be > -1");
      }
      if (zero_eq && std::abs(imp.map(0.0)) > 1e-12) {
        throw ConfigError(field, "I_k(0) must vanish for the zero equilibrium");
      }
    }
  }

  for (std::size_t i = 0; i < s.yorke.terms.size(); ++i) {
    const YorkeTerm& y = s.yorke.terms[i];
    const std::string field = "yorke[" + std::to_string(i) + "]";
    if (y.delay >= s.delays.size()) throw ConfigError(field + ".delay", "delay index out of range");
    check_grid(field + ".lambda1", y.lambda1, lo, hi, n, [](double v) { return v >= 0.0; }, "lambda >= 0");
    check_grid(field + ".lambda2", y.lambda2, lo, hi, n, [](double v) { return v >= 0.0; }, "lambda >= 0");
  }

  if (const auto* h = std::get_if<Trajectory>(&s.history)) {
    const double need = s.t0 - s.tau_bar();
    if (h->t_start() > need + 1e-12 * std::max(1.0, std::abs(need))) {
      throw ConfigError("history", "window must reach back to t0 - tau_bar = " + std::to_string(need));
    }
    if (h->t_end() != s.t0) throw ConfigError("history", "history must end at t0");
  }
}

}  // namespace idde
