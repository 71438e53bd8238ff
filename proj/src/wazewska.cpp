#include "idde/wazewska.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "idde/errors.hpp"

namespace idde {

namespace {

bool periodic(const Fn& f, double w) { return f.is_constant() || f.periodic_with(w); }

// One period [start, start + omega] of x as a trajectory on [0, omega].
Trajectory slice_period(const Trajectory& x, double start, double omega) {
  const auto segs = x.segments();
  auto it = std::lower_bound(segs.begin(), segs.end(), start, [](const Segment& s, double v) { return s.t1 <= v; });
  if (it == segs.end() || std::abs(it->t0 - start) > 1e-9 * std::max(1.0, std::abs(start))) {
    throw NumericError("period start is not a step node");
  }
  Trajectory out(0.0, it->x0);
  const double end = start + omega;
  for (; it != segs.end() && it->t0 < end - 1e-12 * std::max(1.0, end); ++it) {
    if (it->t0 > start && x.has_jump_at(it->t0)) out.add_jump(it->x0);
    Segment s = *it;
    s.t0 = out.t_end();
    s.t1 = std::min(it->t1 - start, omega);
    if (std::next(it) == segs.end() || std::next(it)->t0 >= end - 1e-12 * std::max(1.0, end)) s.t1 = omega;
    out.append(s);
  }
  return out;
}

// sup over [lo, hi] of |x - ref| at step nodes, quarter points and both jump sides.
template <class Ref>
double window_gap(const Trajectory& x, const Ref& ref, double lo, double hi) {
  double worst = 0.0;
  const auto segs = x.segments();
  auto it = std::lower_bound(segs.begin(), segs.end(), lo, [](const Segment& s, double v) { return s.t1 <= v; });
  for (; it != segs.end() && it->t0 < hi; ++it) {
    const Segment& s = *it;
    worst = std::max(worst, std::abs(s.x0 - ref(s.t0, Side::right)));
    for (double f : {0.25, 0.5, 0.75}) {
      const double t = s.t0 + f * (s.t1 - s.t0);
      worst = std::max(worst, std::abs(s.value(t) - ref(t, Side::left)));
    }
    worst = std::max(worst, std::abs(s.x1 - ref(s.t1, Side::left)));
  }
  return worst;
}

Trajectory scaled_history(const PeriodicTrajectory& nstar, double lo, double scale) {
  return nstar.extended(lo, 0.0).transformed(0.0, scale);
}

}  // namespace

WazewskaModel::WazewskaModel(Scenario s) : s_(std::move(s)) {
  if (s_.rhs.kind() != RhsKind::wazewska) throw ConfigError("rhs.kind", "expected a Wazewska equation");
  if (!s_.omega) throw ConfigError("omega", "the Wazewska model needs a period");
  const double w = *s_.omega;
  if (!periodic(s_.damping, w)) throw ConfigError("damping", "must be omega-periodic");
  for (std::size_t i = 0; i < s_.rhs.wazewska_terms().size(); ++i) {
    const auto& term = s_.rhs.wazewska_terms()[i];
    const std::string f = "rhs.terms[" + std::to_string(i) + "]";
    if (!periodic(term.b, w)) throw ConfigError(f + ".b", "must be omega-periodic");
    if (!periodic(term.beta, w)) throw ConfigError(f + ".beta", "must be omega-periodic");
    if (term.b.sampled_min(0.0, w, s_.grid_density) <= 0.0) throw ConfigError(f + ".b", "must be positive");
    if (term.beta.sampled_min(0.0, w, s_.grid_density) <= 0.0) throw ConfigError(f + ".beta", "must be positive");
    const DelaySpec& d = s_.delays[term.delay];
    if (d.kind() == DelayKind::periodic && !periodic(d.fn(), w)) throw ConfigError(f + ".delay", "must be omega-periodic");
  }
  if (s_.damping.sampled_min(0.0, w, s_.grid_density) <= 0.0) throw ConfigError("damping", "must be positive");
  double declared = 1.0;
  bool any = false;
  for (const Impulse& imp : s_.impulses.base()) {
    if (imp.bounds.quotient) {
      any = true;
      declared *= 1.0 + imp.bounds.quotient->second;
    }
  }
  if (any && declared > 1.0 + 1e-12) throw ConfigError("impulses", "declared bounds violate prod (1 + a_k) <= 1");
}

double WazewskaModel::period_product() const {
  double prod = 1.0;
  for (const Impulse& imp : s_.impulses.base()) {
    if (!imp.map.is_linear()) throw ConfigError("impulses", "product needs linear impulses");
    prod *= 1.0 + imp.map.slope();
  }
  return prod;
}

double WazewskaModel::default_level() const {
  const double w = omega();
  double num = 0.0;
  for (const auto& term : s_.rhs.wazewska_terms()) num += term.b.sampled_max(0.0, w, s_.grid_density);
  return num / s_.damping.sampled_min(0.0, w, s_.grid_density);
}

double wazewska_rhs(const Scenario& s, double t, std::span<const double> delayed) {
  const auto k = s.rhs.kind();
  if (k != RhsKind::wazewska && k != RhsKind::translated_wazewska) throw ConfigError("rhs.kind", "not a Wazewska form");
  if (delayed.size() < s.delays.size()) throw ConfigError("window", "one delayed value per delay slot is needed");
  return s.rhs.eval(t, delayed, s.delays);
}

Scenario translated_scenario(const WazewskaModel& model, const PeriodicTrajectory& nstar) {
  Scenario out = model.scenario();
  auto shared = std::make_shared<const PeriodicTrajectory>(nstar);
  out.rhs = Rhs::translated_wazewska(model.scenario().rhs.wazewska_terms(), shared);
  std::vector<Impulse> base;
  for (const Impulse& imp : model.scenario().impulses.base()) {
    Impulse moved = imp;
    if (!imp.map.is_linear()) {
      const double n = nstar(imp.t);
      const ImpulseMap map = imp.map;
      moved.map = ImpulseMap::custom([map, n](double x) { return map(x + n) - map(n); });
    }
    base.push_back(moved);
  }
  if (!base.empty()) out.impulses = ImpulseSchedule(base, model.omega());
  out.history = Fn::constant(0.0);
  out.yorke = {};
  return out;
}

PeriodicSolution find_periodic(const WazewskaModel& model, const FinderOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("tol", "must be positive");
  if (opts.max_periods < 2) throw ConfigError("max_periods", "at least two periods are needed");
  const double w = model.omega();
  Scenario s = model.scenario();
  s.t0 = 0.0;
  PeriodicSolution sol;
  sol.n0 = opts.n0.value_or(model.default_level());
  if (!(sol.n0 > 0.0)) throw ConfigError("n0", "initial level must be positive");
  s.history = Fn::constant(sol.n0);

  Integrator integ(s, opts.step);
  integ.advance_to(w);
  int m = 1;
  for (; m < opts.max_periods;) {
    ++m;
    integ.advance_to(m * w);
    const Trajectory& x = integ.trajectory();
    const double lo = (m - 1) * w;
    const double delta = window_gap(
        x, [&](double t, Side side) { return side == Side::right ? x.eval_right_limit(t - w) : x.eval(t - w); }, lo,
        m * w);
    sol.deltas.push_back(delta);
    if (delta < opts.tol) break;
    integ.discard_before(lo);
  }
  sol.periods = m;
  if (sol.deltas.back() >= opts.tol) {
    const std::size_t keep = std::min<std::size_t>(10, sol.deltas.size());
    std::vector<double> tail(sol.deltas.end() - static_cast<long>(keep), sol.deltas.end());
    throw NonConvergenceError("period map did not reach tol " + format_double(opts.tol) + " within " +
                                  std::to_string(opts.max_periods) +
                                  " periods; existence of a positive periodic solution is unresolved unless an "
                                  "existence condition holds",
                              std::move(tail));
  }
  sol.nstar = PeriodicTrajectory(slice_period(integ.trajectory(), (m - 1) * w, w), w);
  if (sol.nstar.min_value() <= 0.0) throw NumericError("periodic solution is not positive");

  for (const Jump& j : sol.nstar.period().jumps()) {
    const long k = model.scenario().impulses.first_index_at_or_after(j.t - 1e-12);
    const double expect = j.left + model.scenario().impulses.apply(k, j.left);
    sol.jump_residual = std::max(sol.jump_residual, std::abs(j.right - expect) / std::max(std::abs(expect), 1e-300));
  }

  // One more period from the returned orbit as history.
  Scenario check = model.scenario();
  check.t0 = 0.0;
  const double back = std::max(check.tau_bar(), w);
  check.history = scaled_history(sol.nstar, -back, 1.0);
  const Trajectory next = integrate(check, opts.step, w);
  sol.periodicity_residual = window_gap(
      next, [&](double t, Side side) { return side == Side::right ? sol.nstar.right_limit(t) : sol.nstar(t); }, 0.0, w);
  return sol;
}

json to_json(const PeriodicSolution& sol) {
  return {{"omega", sol.nstar.omega()},
          {"periods", sol.periods},
          {"n0", sol.n0},
          {"deltas", sol.deltas},
          {"periodicity_residual", sol.periodicity_residual},
          {"jump_residual", sol.jump_residual},
          {"max", sol.nstar.max_value()},
          {"min", sol.nstar.min_value()},
          {"nstar", periodic_to_json(sol.nstar)}};
}

double equilibrium_residual(const WazewskaModel& model, const PeriodicTrajectory& nstar, std::span<const double> grid) {
  const Scenario& s = model.scenario();
  for (const auto& term : s.rhs.wazewska_terms()) {
    if (s.delays[term.delay].kind() != DelayKind::multiple) throw ConfigError("delays", "needs delays m_i omega");
  }
  const double h = 1e-4;
  double worst = 0.0;
  for (double t : grid) {
    const double d = (-nstar(t + 2 * h) + 8 * nstar(t + h) - 8 * nstar(t - h) + nstar(t - 2 * h)) / (12 * h);
    double f = -s.damping(t) * nstar(t) - d;
    for (const auto& term : s.rhs.wazewska_terms()) f += term.b(t) * std::exp(-term.beta(t) * nstar(t));
    worst = std::max(worst, std::abs(f));
  }
  return worst;
}

std::string to_string(Oscillation o) {
  switch (o) {
    case Oscillation::oscillatory: return "oscillatory";
    case Oscillation::non_oscillatory: return "non-oscillatory";
    case Oscillation::settled: return "settled";
  }
  return "settled";
}

bool AttractivityReport::attracting() const {
  return !runs.empty() && std::all_of(runs.begin(), runs.end(), [](const AttractivityRun& r) { return r.first_below.has_value(); });
}

AttractivityReport verify_attractivity(const Scenario& scenario, const PeriodicTrajectory* reference, double period,
                                       const VerifyOptions& opts) {
  if (!(period > 0.0)) throw ConfigError("period", "must be positive");
  if (opts.horizon_periods < 1) throw ConfigError("horizon", "must be at least one period");
  if (reference && scenario.omega && std::abs(reference->omega() - *scenario.omega) > 1e-12 * *scenario.omega) {
    throw ConfigError("nstar", "period does not match the model");
  }
  AttractivityReport rep;
  rep.tol = opts.tol;
  rep.horizon_periods = opts.horizon_periods;
  rep.period = period;
  auto ref = [&](double t, Side side) {
    if (!reference) return 0.0;
    return side == Side::right ? reference->right_limit(t) : (*reference)(t);
  };
  for (double scale : opts.scales) {
    if (!(scale > 0.0)) throw ConfigError("scales", "must be positive");
    Scenario s = scenario;
    if (reference) {
      s.t0 = 0.0;
      s.history = scaled_history(*reference, -std::max(s.tau_bar(), period), scale);
    } else if (const Fn* f = std::get_if<Fn>(&s.history)) {
      s.history = f->scaled(scale);
    } else {
      s.history = std::get<Trajectory>(s.history).transformed(0.0, scale);
    }
    AttractivityRun run;
    run.scale = scale;
    Integrator integ(s, opts.step);
    const double t0 = s.t0;
    int signs = 0;
    int last_sign = 0;
    const double quiet = 1e-12;
    for (int m = 0; m < opts.horizon_periods; ++m) {
      const double lo = t0 + m * period;
      const double hi = t0 + (m + 1) * period;
      integ.advance_to(hi);
      const Trajectory& x = integ.trajectory();
      const double e = window_gap(x, ref, lo, hi);
      run.errors.push_back(e);
      if (!run.first_below && e < opts.tol) run.first_below = m;
      if (m >= opts.horizon_periods - 10) {
        for (const Segment& seg : x.segments()) {
          if (seg.t1 <= lo || seg.t0 >= hi) continue;
          const double d = seg.x1 - ref(seg.t1, Side::left);
          if (std::abs(d) <= quiet * std::max(1.0, std::abs(seg.x1))) continue;
          const int sign = d > 0 ? 1 : -1;
          if (last_sign != 0 && sign != last_sign) ++signs;
          last_sign = sign;
        }
      }
      integ.discard_before(lo);
    }
    run.final_value = integ.state();
    if (last_sign == 0) {
      run.oscillation = Oscillation::settled;
    } else {
      run.oscillation = signs >= 2 ? Oscillation::oscillatory : Oscillation::non_oscillatory;
    }
    rep.runs.push_back(std::move(run));
  }
  return rep;
}

AttractivityReport verify_attractivity(const WazewskaModel& model, const PeriodicTrajectory& nstar,
                                       const VerifyOptions& opts) {
  return verify_attractivity(model.scenario(), &nstar, model.omega(), opts);
}

json to_json(const AttractivityReport& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"scale", run.scale},
                    {"errors", run.errors},
                    {"first_below", run.first_below ? json(*run.first_below) : json(nullptr)},
                    {"oscillation", to_string(run.oscillation)},
                    {"final_value", run.final_value}});
  }
  return {{"tol", r.tol},
          {"horizon_periods", r.horizon_periods},
          {"period", r.period},
          {"verdict", r.attracting() ? "attracting" : "not attracting"},
          {"runs", runs}};
}

}  // namespace idde
