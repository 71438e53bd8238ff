#include "idde/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "idde/errors.hpp"
#include "idde/quadrature.hpp"

namespace idde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lower_factor(const ImpulseSchedule& s, long k, FactorSource src) {
  return src == FactorSource::ratio ? s.ratio_lower(k) : 1.0 + s.quotient_lower(k);
}

// max over suffix products of 1/b_k for t - tau <= t_k < t, empty product 1.
double window_B(const ImpulseSchedule& s, double t, double tau, FactorSource src) {
  if (s.empty()) return 1.0;
  const auto ks = s.indices_in(t - tau, t, true, false);
  double best = 1.0;
  double prod = 1.0;
  for (auto it = ks.rbegin(); it != ks.rend(); ++it) {
    prod /= lower_factor(s, *it, src);
    best = std::max(best, prod);
  }
  return best;
}

bool fn_periodic(const Fn& f, double omega) { return f.is_constant() || f.periodic_with(omega); }

bool delay_periodic(const DelaySpec& d, double omega) {
  return d.kind() != DelayKind::periodic || fn_periodic(d.fn(), omega);
}

bool scenario_periodic(const Scenario& s, const YorkeBounds& bounds) {
  if (!s.omega) return false;
  const double w = *s.omega;
  if (!fn_periodic(s.damping, w)) return false;
  for (const DelaySpec& d : s.delays) {
    if (!delay_periodic(d, w)) return false;
  }
  for (const YorkeTerm& y : bounds.terms) {
    if (!fn_periodic(y.lambda1, w) || !fn_periodic(y.lambda2, w)) return false;
  }
  for (const auto& term : s.rhs.wazewska_terms()) {
    if (!fn_periodic(term.b, w) || !fn_periodic(term.beta, w)) return false;
  }
  return true;
}

double linear_period_product(const ImpulseSchedule& s) {
  double prod = 1.0;
  for (const Impulse& imp : s.base()) prod *= 1.0 + imp.map.slope();
  return prod;
}

bool all_multiples(const Scenario& s) {
  return std::all_of(s.delays.begin(), s.delays.end(), [](const DelaySpec& d) { return d.kind() == DelayKind::multiple; });
}

int max_multiple(const Scenario& s) {
  int m = 0;
  for (const auto& term : s.rhs.wazewska_terms()) m = std::max(m, s.delays[term.delay].multiple_m());
  return m;
}

// Everything one window integral needs, fixed for a whole sup computation.
struct Window {
  const Scenario& s;
  AlphaVariant variant;
  const PeriodicTrajectory* nstar;
  const AlphaOptions& opts;
  std::vector<const Fn*> lambda1;
  std::vector<const Fn*> lambda2;
  std::vector<std::size_t> delay;
  FactorSource src = FactorSource::ratio;
  int mbar = 0;

  double tau(double t) const {
    if (variant == AlphaVariant::thm3_5) return mbar * *s.omega;
    double best = 0.0;
    for (std::size_t d : delay) best = std::max(best, s.delays[d].tau(t));
    return best;
  }

  std::vector<double> cuts(double lo, double t) const {
    std::vector<double> out = {lo, t};
    auto inside = [&](double v) {
      if (v > lo && v < t) out.push_back(v);
    };
    if (!s.impulses.empty()) {
      double reach = 0.0;
      for (std::size_t d : delay) reach = std::max(reach, s.delays[d].max_over(lo, t, 64));
      for (long k : s.impulses.indices_in(lo - reach - 1e-9, t, true, false)) {
        const double tk = s.impulses.instant(k);
        inside(tk);
        for (std::size_t d : delay) inside(s.delays[d].lag_preimage(tk));
      }
    }
    for (double k : s.damping.knots(lo, t)) inside(k);
    for (const Fn* f : lambda1) for (double k : f->knots(lo, t)) inside(k);
    for (const Fn* f : lambda2) for (double k : f->knots(lo, t)) inside(k);
    for (const auto& term : s.rhs.wazewska_terms()) {
      for (double k : term.b.knots(lo, t)) inside(k);
      for (double k : term.beta.knots(lo, t)) inside(k);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Integrand on one piece; `mid` fixes the piecewise-constant factors.
  struct Piece {
    std::vector<double> b;  // per-term B_i (or a single common value)
    double common = 1.0;
  };

  Piece piece(double mid, double t) const {
    Piece p;
    switch (variant) {
      case AlphaVariant::single:
      case AlphaVariant::sigma_yan:
        p.common = window_B(s.impulses, mid, tau(mid), src);
        break;
      case AlphaVariant::multi:
      case AlphaVariant::thm3_1:
      case AlphaVariant::cor2_2:
        for (std::size_t d : delay) p.b.push_back(window_B(s.impulses, mid, s.delays[d].tau(mid), src));
        break;
      case AlphaVariant::thm3_5: {
        double prod = 1.0;
        if (!s.impulses.empty()) {
          for (long k : s.impulses.indices_in(mid, t, true, false)) prod *= 1.0 + s.impulses.impulse(k).map.slope();
        }
        p.common = prod;
        break;
      }
    }
    return p;
  }

  double integrand(double x, double t, double lo, int j, const Piece& p) const {
    const auto& lam = j == 1 ? lambda1 : lambda2;
    switch (variant) {
      case AlphaVariant::single: {
        double sum = 0.0;
        for (const Fn* f : lam) sum += (*f)(x);
        return sum * p.common * std::exp(-s.damping.integral(x, t));
      }
      case AlphaVariant::sigma_yan: {
        double sum = 0.0;
        for (const Fn* f : lambda2) sum += (*f)(x);
        return sum * p.common * std::exp(s.damping.integral(lo, x));
      }
      case AlphaVariant::multi:
      case AlphaVariant::thm3_1:
      case AlphaVariant::cor2_2: {
        double sum = 0.0;
        for (std::size_t i = 0; i < lam.size(); ++i) sum += (*lam[i])(x) * p.b[i];
        return sum * std::exp(-s.damping.integral(x, t));
      }
      case AlphaVariant::thm3_5: {
        const double n = (*nstar)(x);
        double sum = 0.0;
        for (const auto& term : s.rhs.wazewska_terms()) {
          const double beta = term.beta(x);
          double v = term.b(x) * beta * n;
          if (j == 1) v *= std::exp(-beta * n);
          sum += v;
        }
        return sum * p.common * std::exp(-s.damping.integral(x, t));
      }
    }
    return 0.0;
  }

  double value(double t, int j) const {
    const double lo = t - tau(t);
    const auto cs = cuts(lo, t);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      const double a = cs[i];
      const double b = cs[i + 1];
      const double mid = 0.5 * (a + b);
      const Piece p = piece(mid, t);
      // Endpoints are read slightly inside the piece so lookups at a jump
      // take the value that belongs to this piece.
      const double ea = 1e-12 * std::max(1.0, std::abs(a));
      const double eb = 1e-12 * std::max(1.0, std::abs(b));
      if (b - a <= 4 * (ea + eb)) {
        total += (b - a) * integrand(mid, t, lo, j, p);
        continue;
      }
      auto f = [&](double x) {
        const double y = x <= a ? a + ea : (x >= b ? b - eb : x);
        return integrand(y, t, lo, j, p);
      };
      const auto r = quad::simpson_richardson(f, a, b, opts.abs_tol, opts.rel_tol, 16, 1 << 15);
      if (!r.converged) {
        throw NumericError("window quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] (Richardson difference " + std::to_string(r.error_estimate) + ")");
      }
      total += r.value;
    }
    if (variant == AlphaVariant::thm3_5) total /= (*nstar)(t);
    return total;
  }
};

std::unique_ptr<Window> make_window(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant,
                                    const PeriodicTrajectory* nstar, const AlphaOptions& opts) {
  auto w = std::unique_ptr<Window>(new Window{s, variant, nstar, opts, {}, {}, {}, FactorSource::ratio, 0});
  if (variant == AlphaVariant::thm3_1 || variant == AlphaVariant::thm3_5) {
    if (!nstar) throw ConfigError("nstar", "this criterion needs a periodic solution");
    if (s.rhs.kind() != RhsKind::wazewska) throw ConfigError("rhs", "this criterion applies to the Wazewska equation");
    w->src = FactorSource::quotient;
  }
  if (variant == AlphaVariant::thm3_5) {
    if (!s.omega) throw ConfigError("omega", "needs a period");
    if (!all_multiples(s)) throw ConfigError("delays", "needs delays m_i omega");
    if (!s.impulses.empty() && !s.impulses.all_linear()) throw ConfigError("impulses", "needs linear impulses");
    w->mbar = max_multiple(s);
    for (const auto& term : s.rhs.wazewska_terms()) w->delay.push_back(term.delay);
    return w;
  }
  if (bounds.empty()) throw ConfigError("yorke", "no Yorke bounds declared");
  for (const YorkeTerm& y : bounds.terms) {
    if (y.delay >= s.delays.size()) throw ConfigError("yorke.delay", "delay index out of range");
    w->lambda1.push_back(&y.lambda1);
    w->lambda2.push_back(&y.lambda2);
    w->delay.push_back(y.delay);
  }
  return w;
}

// Sup of g over [lo, hi]: uniform grid, impulse instants from both sides,
// then golden-section refinement around the best sample.
template <class G>
std::pair<double, double> sup_over(const G& g, double lo, double hi, int points, const ImpulseSchedule& imp) {
  std::vector<double> ts;
  const int n = std::max(points, 1024);
  const double cell = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) ts.push_back(lo + (hi - lo) * i / n);
  if (!imp.empty()) {
    for (long k : imp.indices_in(lo, hi, true, true)) {
      const double tk = imp.instant(k);
      for (double v : {tk - cell, tk, tk + 1e-9 * std::max(1.0, std::abs(tk)), tk + cell}) {
        if (v >= lo && v <= hi) ts.push_back(v);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double best = -kInf;
  double arg = lo;
  for (double t : ts) {
    const double v = g(t);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  double a = std::max(lo, arg - cell);
  double b = std::min(hi, arg + cell);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = g(x1);
  double f2 = g(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 > best) {
      best = f1;
      arg = x1;
    }
    if (f2 > best) {
      best = f2;
      arg = x2;
    }
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = g(x2);
    }
  }
  return {best, arg};
}

std::string verdict_note(Verdict v, const std::string& what) {
  switch (v) {
    case Verdict::pass: return what + " holds";
    case Verdict::fail: return what + " fails";
    case Verdict::inconclusive: return what + " is within the verdict band";
  }
  return {};
}

void append_note(std::string& notes, const std::string& more) {
  if (more.empty()) return;
  if (!notes.empty()) notes += "; ";
  notes += more;
}

// Sample points of one period (or window) with both sides of each impulse
// instant and of each lag preimage of an instant.
std::vector<double> pointwise_grid(const Scenario& s, double lo, double hi, int n) {
  std::vector<double> ts;
  for (int i = 0; i <= n; ++i) ts.push_back(lo + (hi - lo) * i / n);
  if (!s.impulses.empty()) {
    double reach = 0.0;
    for (const DelaySpec& d : s.delays) reach = std::max(reach, d.max_over(lo, hi, 64));
    for (long k : s.impulses.indices_in(lo - reach - 1e-9, hi, true, true)) {
      const double tk = s.impulses.instant(k);
      std::vector<double> marks = {tk};
      for (const DelaySpec& d : s.delays) marks.push_back(d.lag_preimage(tk));
      for (double m : marks) {
        for (double v : {m, m + 1e-9 * std::max(1.0, std::abs(m))}) {
          if (v >= lo && v <= hi) ts.push_back(v);
        }
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

struct Overlines {
  double nbar = 0.0;
  double beta_bar = 0.0;
  double betan_bar = 0.0;
  double int_a = 0.0;
};

Overlines overlines(const Scenario& s, const PeriodicTrajectory& nstar, int density) {
  const double w = *s.omega;
  Overlines o;
  o.nbar = nstar.max_value();
  o.int_a = s.damping.integral(0.0, w);
  std::vector<double> ts;
  const int n = std::max(density, 4096);
  for (int i = 0; i <= n; ++i) ts.push_back(w * i / n);
  for (const Impulse& imp : s.impulses.base()) ts.push_back(imp.t);
  for (double t : ts) {
    for (const auto& term : s.rhs.wazewska_terms()) {
      const double beta = term.beta(t);
      o.beta_bar = std::max(o.beta_bar, beta);
      o.betan_bar = std::max({o.betan_bar, beta * nstar(t), beta * nstar.right_limit(t)});
    }
  }
  return o;
}

}  // namespace

// ---- naming and reports ----

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(CriterionId id) {
  switch (id) {
    case CriterionId::H1: return "H1";
    case CriterionId::H2: return "H2";
    case CriterionId::H3i: return "H3i";
    case CriterionId::H5: return "H5";
    case CriterionId::SIGMA_YAN: return "SIGMA_YAN";
    case CriterionId::COR2_2: return "COR2_2";
    case CriterionId::LEMMA3_1: return "LEMMA3_1";
    case CriterionId::THM3_1: return "THM3_1";
    case CriterionId::THM3_2: return "THM3_2";
    case CriterionId::THM3_3: return "THM3_3";
    case CriterionId::THM3_4: return "THM3_4";
    case CriterionId::THM3_5: return "THM3_5";
    case CriterionId::THM3_6: return "THM3_6";
    case CriterionId::COR3_2: return "COR3_2";
  }
  return "?";
}

std::string to_string(AlphaVariant v) {
  switch (v) {
    case AlphaVariant::single: return "single";
    case AlphaVariant::multi: return "multi";
    case AlphaVariant::thm3_1: return "thm3_1";
    case AlphaVariant::thm3_5: return "thm3_5";
    case AlphaVariant::sigma_yan: return "sigma_yan";
    case AlphaVariant::cor2_2: return "cor2_2";
  }
  return "?";
}

Verdict strict_less(double value, double threshold, double band) {
  if (std::isnan(value)) return Verdict::inconclusive;
  if (value < threshold - band) return Verdict::pass;
  if (value > threshold + band) return Verdict::fail;
  return Verdict::inconclusive;
}

double CriterionResult::value(const std::string& name) const {
  for (const auto& [k, v] : values) {
    if (k == name) return v;
  }
  throw ConfigError(name, "no such value in " + to_string(id));
}

bool CriterionResult::has_value(const std::string& name) const {
  return std::any_of(values.begin(), values.end(), [&](const auto& kv) { return kv.first == name; });
}

void CriterionResult::set(const std::string& name, double v) {
  for (auto& kv : values) {
    if (kv.first == name) {
      kv.second = v;
      return;
    }
  }
  values.emplace_back(name, v);
}

json to_json(const CriterionResult& r) {
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
  return {{"id", to_string(r.id)},
          {"values", values},
          {"threshold", r.threshold},
          {"verdict", to_string(r.verdict)},
          {"hypotheses", r.hypotheses_met ? "met" : "not met"},
          {"notes", r.notes}};
}

json report_to_json(std::span<const CriterionResult> results) {
  json out = json::array();
  for (const auto& r : results) out.push_back(to_json(r));
  return out;
}

const CriterionResult* find(std::span<const CriterionResult> results, CriterionId id) {
  for (const auto& r : results) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

// ---- impulse hypotheses ----

std::vector<double> default_h1_grid(H1Mode mode, int points) {
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    const double u = std::pow(10.0, -3.0 + 6.0 * i / (points - 1));
    out.push_back(u);
    if (mode == H1Mode::ratio) out.push_back(-u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

H1Estimate check_h1(const ImpulseSchedule& schedule, std::span<const double> u_grid, H1Mode mode) {
  if (u_grid.empty()) throw ConfigError("u_grid", "empty sample grid");
  H1Estimate est;
  est.mode = mode;
  std::vector<double> us(u_grid.begin(), u_grid.end());
  std::sort(us.begin(), us.end());
  bool sampled = false;
  for (std::size_t k = 0; k < schedule.p(); ++k) {
    const Impulse& imp = schedule.base()[k];
    double lo = kInf;
    double hi = -kInf;
    if (imp.map.is_linear()) {
      const double v = mode == H1Mode::ratio ? 1.0 + imp.map.slope() : imp.map.slope();
      lo = hi = v;
    } else if (mode == H1Mode::ratio) {
      sampled = true;
      for (double u : us) {
        if (u == 0.0) continue;
        const double r = (u + imp.map(u)) / u;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    } else {
      sampled = true;
      double prev = std::numeric_limits<double>::quiet_NaN();
      for (double u : us) {
        if (u < 0.0) continue;
        if (!std::isnan(prev)) {
          const double q = (imp.map(u) - imp.map(prev)) / (u - prev);
          lo = std::min(lo, q);
          hi = std::max(hi, q);
        }
        prev = u;
      }
    }
    if (!(lo <= hi)) throw ConfigError("u_grid", "grid has too few usable points");
    est.lower.push_back(lo);
    est.upper.push_back(hi);
  }
  bool ok = true;
  bool declared_ok = true;
  for (std::size_t k = 0; k < est.lower.size(); ++k) {
    const Impulse& imp = schedule.base()[k];
    if (mode == H1Mode::ratio) {
      ok = ok && est.lower[k] > 0.0;
      if (imp.bounds.ratio) {
        const auto [a, b] = *imp.bounds.ratio;
        if (est.lower[k] < b - 1e-12 || est.upper[k] > a + 1e-12) {
          declared_ok = false;
          append_note(est.notes, "impulse " + std::to_string(k + 1) + " leaves its declared ratio bounds");
        }
      }
    } else {
      ok = ok && est.lower[k] > -1.0;
      if (imp.bounds.quotient) {
        const auto [lo, hi] = *imp.bounds.quotient;
        if (est.lower[k] < lo - 1e-12 || est.upper[k] > hi + 1e-12) {
          declared_ok = false;
          append_note(est.notes, "impulse " + std::to_string(k + 1) + " leaves its declared quotient bounds");
        }
      }
    }
  }
  est.verdict = ok && declared_ok ? Verdict::pass : Verdict::fail;
  if (sampled) append_note(est.notes, "grid extrema are inner estimates of the true bounds, not proofs");
  return est;
}

ProductClass classify_products(std::span<const double> a) {
  ProductClass c;
  double prod = 1.0;
  for (double v : a) {
    prod *= v;
    c.partial.push_back(prod);
  }
  c.period_product = prod;
  if (a.empty()) return c;
  if (prod > 1.0 + kVerdictBand) {
    c.bounded = Verdict::fail;
    c.convergent = Verdict::fail;
  } else if (prod < 1.0 - kVerdictBand) {
    c.bounded = Verdict::pass;
    c.convergent = Verdict::pass;
    c.tends_to_zero = true;
  } else {
    c.bounded = Verdict::pass;
    const bool flat = std::all_of(c.partial.begin(), c.partial.end(),
                                  [&](double v) { return std::abs(v - c.partial.front()) <= kVerdictBand; });
    c.convergent = flat ? Verdict::pass : Verdict::inconclusive;
  }
  return c;
}

std::vector<double> upper_factors(const ImpulseSchedule& schedule, FactorSource source) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= schedule.p(); ++k) {
    out.push_back(source == FactorSource::ratio ? schedule.ratio_upper(long(k)) : 1.0 + schedule.quotient_upper(long(k)));
  }
  return out;
}

double big_B(const ImpulseSchedule& schedule, const DelaySpec& delay, double t, FactorSource source) {
  return window_B(schedule, t, delay.tau(t), source);
}

// ---- integral criteria ----

double alpha_start(const Scenario& s, const AlphaOptions& opts) {
  if (opts.T) return *opts.T;
  const double tau_bar = s.tau_bar();
  if (s.omega) {
    const double w = *s.omega;
    return std::max(1.0, std::ceil(tau_bar / w - 1e-12)) * w;
  }
  return tau_bar > 0.0 ? tau_bar : 1.0;
}

double alpha_at(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant, int j, double t,
                const PeriodicTrajectory* nstar, const AlphaOptions& opts) {
  if (variant == AlphaVariant::thm3_1) {
    if (!nstar) throw ConfigError("nstar", "this criterion needs a periodic solution");
    const YorkeBounds wb = wazewska_yorke(s, *nstar, opts.alt_lambda2);
    return make_window(s, wb, variant, nstar, opts)->value(t, j);
  }
  return make_window(s, bounds, variant, nstar, opts)->value(t, j);
}

YorkeBounds wazewska_yorke(const Scenario& s, const PeriodicTrajectory& nstar, bool alt_lambda2) {
  if (s.rhs.kind() != RhsKind::wazewska) throw ConfigError("rhs", "Wazewska bounds need a Wazewska rhs");
  const auto n = std::make_shared<const PeriodicTrajectory>(nstar);
  const Overlines o = overlines(s, nstar, s.grid_density);
  const double scale = std::expm1(o.betan_bar) / o.nbar;
  const std::optional<double> period = s.omega;
  YorkeBounds out;
  for (const auto& term : s.rhs.wazewska_terms()) {
    const Fn b = term.b;
    const Fn beta = term.beta;
    const DelaySpec d = s.delays[term.delay];
    auto damped = [b, beta, d, n](double t) { return b(t) * std::exp(-beta(t) * (*n)(d.lag_point(t))); };
    YorkeTerm y;
    y.delay = term.delay;
    y.lambda1 = Fn::custom([damped, beta](double t) { return beta(t) * damped(t); }, {}, period);
    if (alt_lambda2) {
      y.lambda2 = Fn::custom([damped, scale](double t) { return scale * damped(t); }, {}, period);
    } else {
      y.lambda2 = Fn::custom([b, beta](double t) { return beta(t) * b(t); }, {}, period);
    }
    out.terms.push_back(std::move(y));
  }
  return out;
}

CriterionResult alpha_integrals(const Scenario& s, const YorkeBounds& bounds, AlphaVariant variant,
                                const PeriodicTrajectory* nstar, const AlphaOptions& opts) {
  CriterionResult r;
  YorkeBounds local;
  const YorkeBounds* used = &bounds;
  if (variant == AlphaVariant::thm3_1) {
    if (!nstar) throw ConfigError("nstar", "this criterion needs a periodic solution");
    local = wazewska_yorke(s, *nstar, opts.alt_lambda2);
    used = &local;
  }
  switch (variant) {
    case AlphaVariant::single:
    case AlphaVariant::multi: r.id = CriterionId::H5; break;
    case AlphaVariant::thm3_1: r.id = CriterionId::THM3_1; break;
    case AlphaVariant::thm3_5: r.id = CriterionId::THM3_5; break;
    case AlphaVariant::sigma_yan: r.id = CriterionId::SIGMA_YAN; break;
    case AlphaVariant::cor2_2: r.id = CriterionId::COR2_2; break;
  }
  const bool periodic = scenario_periodic(s, *used);
  const double T = alpha_start(s, opts);
  const double span = periodic ? *s.omega : opts.horizon;
  const auto w = make_window(s, *used, variant, nstar, opts);
  r.set("T", T);
  if (!periodic) {
    append_note(r.notes, "coefficients are not periodic: sup taken over [T, T + " + format_double(span) +
                             "], inconclusive beyond horizon");
  }

  if (variant == AlphaVariant::sigma_yan) {
    const auto [sigma, arg] = sup_over([&](double t) { return w->value(t, 2); }, T, T + span, opts.grid_points, s.impulses);
    r.set("sigma", sigma);
    r.set("t_sup", arg);
    r.threshold = 1.5;
    r.verdict = strict_less(sigma, 1.5);
    r.hypotheses_met = false;
    append_note(r.notes, "informational: evaluated with lambda = sum of lambda_2; the comparison criterion also needs "
                         "lambda_1 = lambda_2, a_k = 1 and a non-oscillation condition, which are not checked");
    return r;
  }

  if (variant == AlphaVariant::cor2_2) {
    // c_j = sup sum_i lambda_{j,i} B_i / a, A = sup int_{t - tau(t)}^t a.
    const auto ts = pointwise_grid(s, T, T + span, std::max(opts.grid_points, 4096));
    double c1 = 0.0;
    double c2 = 0.0;
    double A = 0.0;
    for (double t : ts) {
      const auto p = w->piece(t, t);
      double l1 = 0.0;
      double l2 = 0.0;
      for (std::size_t i = 0; i < w->lambda1.size(); ++i) {
        l1 += (*w->lambda1[i])(t) * p.b[i];
        l2 += (*w->lambda2[i])(t) * p.b[i];
      }
      const double a = s.damping(t);
      c1 = std::max(c1, a > 0.0 ? l1 / a : (l1 > 0.0 ? kInf : 0.0));
      c2 = std::max(c2, a > 0.0 ? l2 / a : (l2 > 0.0 ? kInf : 0.0));
      A = std::max(A, s.damping.integral(t - w->tau(t), t));
    }
    const double value = std::sqrt(c1 * c2) * -std::expm1(-A);
    r.set("c1", c1);
    r.set("c2", c2);
    r.set("A", A);
    r.set("value", value);
    r.verdict = strict_less(value, 1.0);
    append_note(r.notes, "B_i(t) piecewise constant, sampled on both sides of every impulse instant and lag preimage");
    return r;
  }

  const auto [a1, t1] = sup_over([&](double t) { return w->value(t, 1); }, T, T + span, opts.grid_points, s.impulses);
  const auto [a2, t2] = sup_over([&](double t) { return w->value(t, 2); }, T, T + span, opts.grid_points, s.impulses);
  r.set("alpha1", a1);
  r.set("alpha2", a2);
  r.set("alpha1_alpha2", a1 * a2);
  r.set("t_sup1", t1);
  r.set("t_sup2", t2);
  r.verdict = strict_less(a1 * a2, 1.0);
  if (variant == AlphaVariant::thm3_1 && opts.alt_lambda2) append_note(r.notes, "lambda_2 of the alternative form");
  return r;
}

// ---- reports ----

std::vector<CriterionResult> check_zero_criteria(const Scenario& s, const AlphaOptions& opts) {
  std::vector<CriterionResult> out;

  CriterionResult h1;
  h1.id = CriterionId::H1;
  h1.threshold = 0.0;
  if (s.impulses.empty()) {
    h1.verdict = Verdict::pass;
    h1.notes = "no impulses";
  } else {
    const auto grid = default_h1_grid(H1Mode::ratio);
    const H1Estimate est = check_h1(s.impulses, grid, H1Mode::ratio);
    for (std::size_t k = 0; k < est.lower.size(); ++k) {
      h1.set("b_" + std::to_string(k + 1), est.lower[k]);
      h1.set("a_" + std::to_string(k + 1), est.upper[k]);
    }
    h1.verdict = est.verdict;
    h1.notes = est.notes;
  }
  out.push_back(h1);

  ProductClass pc;
  if (!s.impulses.empty()) {
    try {
      const auto a = upper_factors(s.impulses, FactorSource::ratio);
      pc = classify_products(a);
    } catch (const ConfigError& e) {
      pc.bounded = pc.convergent = Verdict::inconclusive;
    }
  }
  const auto int_a = s.damping.integral_to_infinity();
  const bool a_infinite = int_a && std::isinf(*int_a);

  CriterionResult h2;
  h2.id = CriterionId::H2;
  h2.set("period_product", pc.period_product);
  h2.set("integral_a_infinite", a_infinite ? 1.0 : 0.0);
  if (int_a && std::isfinite(*int_a)) h2.set("integral_a", *int_a);
  if (pc.bounded == Verdict::fail || (int_a && !a_infinite)) {
    h2.verdict = Verdict::fail;
  } else if (pc.bounded == Verdict::pass && a_infinite) {
    h2.verdict = Verdict::pass;
  } else {
    h2.verdict = Verdict::inconclusive;
  }
  append_note(h2.notes, verdict_note(pc.bounded, "(i) boundedness of P_n"));
  append_note(h2.notes, !int_a ? "(ii) undecided for this damping" : (a_infinite ? "(ii) holds" : "(ii) fails: integral of a is finite"));
  out.push_back(h2);

  CriterionResult h3;
  h3.id = CriterionId::H3i;
  h3.set("period_product", pc.period_product);
  h3.set("limit_zero", pc.tends_to_zero ? 1.0 : 0.0);
  h3.verdict = pc.convergent;
  append_note(h3.notes, std::string("(H3)(ii) ") + (s.assume_h3ii ? "assumed" : "not-checked"));
  if (pc.tends_to_zero) append_note(h3.notes, "P_n tends to zero, so (H3)(ii) is not needed");
  out.push_back(h3);

  const bool impulses_ok = h1.verdict == Verdict::pass;
  const bool h3_ok = h3.verdict == Verdict::pass && (s.assume_h3ii || pc.tends_to_zero);
  const bool base_ok = impulses_ok && (h2.verdict == Verdict::pass || h3_ok);
  std::string base_note = base_ok ? "" : "requires (H1) and either (H2) or (H3); not established";

  if (s.yorke.empty()) {
    for (CriterionId id : {CriterionId::H5, CriterionId::SIGMA_YAN, CriterionId::COR2_2}) {
      CriterionResult r;
      r.id = id;
      r.verdict = Verdict::inconclusive;
      r.hypotheses_met = false;
      r.notes = "no Yorke bounds declared";
      out.push_back(r);
    }
    return out;
  }

  CriterionResult h5 = alpha_integrals(s, s.yorke, AlphaVariant::multi, nullptr, opts);
  h5.set("zhang_threshold", 2.25);
  append_note(h5.notes, std::string("alpha1*alpha2 ") + (h5.value("alpha1_alpha2") < 2.25 ? "<" : ">=") +
                            " (3/2)^2 (informational)");
  h5.hypotheses_met = base_ok;
  append_note(h5.notes, base_note);
  out.push_back(h5);

  out.push_back(alpha_integrals(s, s.yorke, AlphaVariant::sigma_yan, nullptr, opts));

  CriterionResult c22 = alpha_integrals(s, s.yorke, AlphaVariant::cor2_2, nullptr, opts);
  c22.hypotheses_met = base_ok;
  append_note(c22.notes, base_note);
  out.push_back(c22);
  return out;
}

std::vector<CriterionResult> closed_form_conditions(const Scenario& s, const PeriodicTrajectory& nstar,
                                                    const AlphaOptions& opts) {
  if (s.rhs.kind() != RhsKind::wazewska) throw ConfigError("rhs", "closed forms apply to the Wazewska equation");
  if (!s.omega) throw ConfigError("omega", "the Wazewska criteria need a period");
  const double w = *s.omega;
  const Overlines o = overlines(s, nstar, s.grid_density);
  const auto& terms = s.rhs.wazewska_terms();
  const bool multiples = all_multiples(s);
  const bool linear = s.impulses.empty() || s.impulses.all_linear();
  const int mbar = multiples ? max_multiple(s) : 0;

  // (i1) lower bounds b_k and (i2) on the upper bounds a_k.
  std::vector<double> bq;
  double i2_prod = 1.0;
  for (std::size_t k = 1; k <= s.impulses.p(); ++k) {
    bq.push_back(s.impulses.quotient_lower(long(k)));
    i2_prod *= 1.0 + s.impulses.quotient_upper(long(k));
  }
  const bool i1 = std::all_of(bq.begin(), bq.end(), [](double b) { return b > -1.0; });
  const bool i2 = i2_prod <= 1.0 + kVerdictBand;
  const bool base_ok = i1 && i2;
  const std::string base_note = base_ok ? "" : "requires (i1) with b_k > -1 and (i2); not established";
  double lin_prod = linear ? linear_period_product(s.impulses) : 1.0;

  std::vector<CriterionResult> out;

  {
    CriterionResult r;
    r.id = CriterionId::LEMMA3_1;
    const double C = -1.0 / std::expm1(-o.int_a);
    double iinf = 0.0;
    bool nonnegative = true;
    const int n = 256;
    for (int i = 0; i < n; ++i) {
      const double u = std::pow(10.0, 3.0 + 3.0 * i / (n - 1));
      double sum = 0.0;
      for (const Impulse& imp : s.impulses.base()) sum += imp.map(u) / u;
      iinf = std::max(iinf, sum);
    }
    for (int i = 0; i <= 4 * n && !s.impulses.empty(); ++i) {
      const double u = i == 0 ? 0.0 : std::pow(10.0, -6.0 + 12.0 * i / (4 * n));
      for (const Impulse& imp : s.impulses.base()) nonnegative = nonnegative && imp.map(u) >= 0.0;
    }
    r.set("C", C);
    r.set("I_inf", iinf);
    r.set("C_I_inf", C * iinf);
    r.verdict = strict_less(C * iinf, 1.0);
    r.hypotheses_met = nonnegative;
    r.notes = "I_inf is an ESTIMATE of a limsup (max over u in [1e3, 1e6])";
    if (!nonnegative) append_note(r.notes, "needs I_k(u) >= 0 for u >= 0, which fails: existence unresolved by this lemma");
    out.push_back(r);
  }

  const double T = alpha_start(s, opts);
  const auto ts = pointwise_grid(s, T, T + w, std::max(s.grid_density, 4096));

  {
    // sum beta_i b_i B_i(t) <= a(t)
    CriterionResult r;
    r.id = CriterionId::THM3_2;
    double worst = 0.0;
    for (double t : ts) {
      double lhs = 0.0;
      for (const auto& term : terms) {
        lhs += term.beta(t) * term.b(t) * window_B(s.impulses, t, s.delays[term.delay].tau(t), FactorSource::quotient);
      }
      worst = std::max(worst, lhs / s.damping(t));
    }
    r.set("max_lhs_over_a", worst);
    r.verdict = strict_less(worst, 1.0);
    r.hypotheses_met = base_ok;
    r.notes = "pointwise over one period with both sides of every impulse instant";
    append_note(r.notes, base_note);
    out.push_back(r);
  }

  {
    CriterionResult r;
    r.id = CriterionId::THM3_3;
    if (!multiples) {
      r.verdict = Verdict::inconclusive;
      r.hypotheses_met = false;
      r.notes = "needs delays m_i omega";
    } else {
      const std::size_t p = s.impulses.p();
      double B = 1.0;
      for (std::size_t l = 1; l <= p; ++l) {
        double prod = 1.0;
        for (std::size_t j = 1; j <= p; ++j) {
          prod /= 1.0 + bq[(l + j - 1) % p];
          B = std::max(B, prod);
        }
      }
      double neg = 0.0;
      for (double b : bq) neg += std::min(b, 0.0);
      const double decay = -std::expm1(-mbar * o.int_a);
      const double bracket = 1.0 - neg / -std::expm1(-o.int_a);
      const double Bm = std::pow(B, mbar);
      const double sigma1 = Bm * o.beta_bar * o.nbar * decay * bracket;
      const double sigma2 = Bm * std::expm1(o.betan_bar) * decay * bracket;
      const double value = Bm * std::sqrt(o.beta_bar * o.nbar * std::expm1(o.betan_bar)) * decay * bracket;
      r.set("B", B);
      r.set("mbar", mbar);
      r.set("beta_bar", o.beta_bar);
      r.set("nstar_bar", o.nbar);
      r.set("betaN_bar", o.betan_bar);
      r.set("integral_a", o.int_a);
      r.set("sum_min_bk", neg);
      r.set("sigma1", sigma1);
      r.set("sigma2", sigma2);
      r.set("value", value);
      r.verdict = strict_less(value, 1.0);
      bool zero_fixed = true;
      for (const Impulse& imp : s.impulses.base()) zero_fixed = zero_fixed && imp.map(0.0) == 0.0;
      r.hypotheses_met = base_ok && zero_fixed;
      append_note(r.notes, base_note);
      if (!zero_fixed) append_note(r.notes, "needs I_k(0) = 0");
    }
    out.push_back(r);
  }

  auto linear_gate = [&](CriterionResult& r) {
    if (!multiples || !linear) {
      r.verdict = Verdict::inconclusive;
      r.hypotheses_met = false;
      r.notes = "needs linear impulses and delays m_i omega";
      return false;
    }
    return true;
  };
  const bool ok318 = lin_prod <= 1.0 + kVerdictBand;
  const std::string note318 = ok318 ? "" : "prod (1 + b_k) > 1: hypothesis fails";

  {
    CriterionResult r;
    r.id = CriterionId::THM3_4;
    if (linear_gate(r)) {
      double worst = 0.0;
      for (double t : ts) {
        double lhs = 0.0;
        for (const auto& term : terms) {
          lhs += std::pow(lin_prod, -s.delays[term.delay].multiple_m()) * term.b(t) * term.beta(t);
        }
        worst = std::max(worst, lhs / s.damping(t));
      }
      r.set("period_product", lin_prod);
      r.set("max_lhs_over_a", worst);
      r.verdict = strict_less(worst, 1.0);
      r.hypotheses_met = ok318;
      r.notes = note318;
    }
    out.push_back(r);
  }

  {
    CriterionResult r;
    r.id = CriterionId::THM3_6;
    if (linear_gate(r)) {
      const double value =
          std::sqrt(o.betan_bar * std::expm1(o.betan_bar)) * (1.0 - std::pow(std::exp(-o.int_a) * lin_prod, mbar));
      r.set("betaN_bar", o.betan_bar);
      r.set("integral_a", o.int_a);
      r.set("period_product", lin_prod);
      r.set("mbar", mbar);
      r.set("sigma", value);
      r.verdict = strict_less(value, 1.0);
      r.hypotheses_met = ok318;
      r.notes = note318;
    }
    out.push_back(r);
  }

  {
    CriterionResult r;
    r.id = CriterionId::COR3_2;
    bool trivial_impulses = true;
    for (const Impulse& imp : s.impulses.base()) trivial_impulses = trivial_impulses && imp.map.is_linear() && imp.map.slope() == 0.0;
    const bool applies = terms.size() == 1 && multiples && trivial_impulses && terms[0].beta.is_constant() &&
                         terms[0].beta(0.0) == 1.0;
    if (!applies) {
      r.verdict = Verdict::inconclusive;
      r.hypotheses_met = false;
      r.notes = "needs a single term with beta = 1, delay m omega and no impulses";
    } else {
      const Fn& b = terms[0].b;
      const int m = s.delays[terms[0].delay].multiple_m();
      const double ma = m * o.int_a;
      auto inner = [&](double t) {
        auto f = [&](double u) { return b(t + u) * std::exp(s.damping.integral(t, t + u)); };
        const auto q = quad::simpson_richardson(f, 0.0, m * w, opts.abs_tol, opts.rel_tol, 16, 1 << 15);
        if (!q.converged) throw NumericError("COR3_2 quadrature did not converge");
        return q.value;
      };
      const auto [sup_inner, arg] = sup_over(inner, 0.0, w, opts.grid_points, ImpulseSchedule());
      const double alpha1 = o.nbar * -std::expm1(-ma);
      const double alpha2 = std::exp(-ma) * sup_inner;
      // Comparison value sigma = int_0^{m omega} b e^{-N*}.
      std::vector<double> cuts = {0.0, m * w};
      for (const Jump& j : nstar.period().jumps()) {
        for (int c = 0; c < m; ++c) cuts.push_back(j.t + c * w);
      }
      std::sort(cuts.begin(), cuts.end());
      double graef = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (hi <= lo) continue;
        auto g = [&](double u) { return b(u) * std::exp(-nstar(u == lo ? std::nextafter(lo, hi) : u)); };
        graef += quad::simpson_richardson(g, lo, hi, opts.abs_tol, opts.rel_tol, 16, 1 << 15).value;
      }
      r.set("alpha1", alpha1);
      r.set("alpha2", alpha2);
      r.set("t_sup2", arg);
      r.set("value", alpha1 * alpha2);
      r.set("graef_sigma", graef);
      r.verdict = strict_less(alpha1 * alpha2, 1.0);
      append_note(r.notes, std::string("comparison criterion sigma <= 1 ") + (graef <= 1.0 ? "holds" : "fails") +
                               "; smaller of the two: " + (alpha1 * alpha2 < graef ? "alpha1*alpha2" : "sigma"));
    }
    out.push_back(r);
  }
  return out;
}

std::vector<CriterionResult> check_wazewska_criteria(const Scenario& s, const PeriodicTrajectory& nstar,
                                                     const AlphaOptions& opts) {
  if (s.rhs.kind() != RhsKind::wazewska) throw ConfigError("rhs", "Wazewska criteria need a Wazewska rhs");
  std::vector<CriterionResult> out;

  CriterionResult h1;
  h1.id = CriterionId::H1;
  h1.threshold = -1.0;
  if (s.impulses.empty()) {
    h1.verdict = Verdict::pass;
    h1.notes = "no impulses";
  } else {
    const auto grid = default_h1_grid(H1Mode::quotient);
    const H1Estimate est = check_h1(s.impulses, grid, H1Mode::quotient);
    for (std::size_t k = 0; k < est.lower.size(); ++k) {
      h1.set("b_" + std::to_string(k + 1), est.lower[k]);
      h1.set("a_" + std::to_string(k + 1), est.upper[k]);
    }
    h1.verdict = est.verdict;
    h1.notes = "difference-quotient form (i1) for the translated system";
    append_note(h1.notes, est.notes);
  }
  out.push_back(h1);

  CriterionResult h2;
  h2.id = CriterionId::H2;
  {
    const ProductClass pc = s.impulses.empty() ? ProductClass{} : classify_products(upper_factors(s.impulses, FactorSource::quotient));
    h2.set("period_product", pc.period_product);
    h2.verdict = pc.bounded;
    h2.notes = "(i2) prod (1 + a_k) <= 1 with a positive periodic a(t)";
  }
  out.push_back(h2);

  const bool multiples = all_multiples(s);
  const bool linear = s.impulses.empty() || s.impulses.all_linear();
  const bool base_ok = h1.verdict == Verdict::pass && h2.verdict == Verdict::pass;

  CriterionResult t31 = alpha_integrals(s, {}, AlphaVariant::thm3_1, &nstar, opts);
  t31.hypotheses_met = base_ok;
  if (!base_ok) append_note(t31.notes, "requires (i1) and (i2); not established");
  out.push_back(t31);

  if (multiples && linear) {
    CriterionResult t35 = alpha_integrals(s, {}, AlphaVariant::thm3_5, &nstar, opts);
    t35.hypotheses_met = linear_period_product(s.impulses) <= 1.0 + kVerdictBand;
    if (!t35.hypotheses_met) append_note(t35.notes, "prod (1 + b_k) > 1: hypothesis fails");
    out.push_back(t35);
  } else {
    CriterionResult t35;
    t35.id = CriterionId::THM3_5;
    t35.verdict = Verdict::inconclusive;
    t35.hypotheses_met = false;
    t35.notes = linear ? "needs delays m_i omega"
                       : "needs linear impulses: the ratio transform cannot satisfy (H2)(i) for other maps";
    out.push_back(t35);
  }

  for (auto& r : closed_form_conditions(s, nstar, opts)) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

bool attractivity_established(std::span<const CriterionResult> results) {
  for (const auto& r : results) {
    switch (r.id) {
      case CriterionId::H5:
      case CriterionId::COR2_2:
      case CriterionId::THM3_1:
      case CriterionId::THM3_2:
      case CriterionId::THM3_3:
      case CriterionId::THM3_4:
      case CriterionId::THM3_5:
      case CriterionId::THM3_6:
      case CriterionId::COR3_2:
        if (r.established()) return true;
        break;
      default: break;
    }
  }
  return false;
}

}  // namespace idde
