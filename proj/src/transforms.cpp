#include "idde/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "idde/errors.hpp"
#include "idde/quadrature.hpp"

namespace idde {

namespace {

std::size_t instants_at_or_before(const std::vector<double>& instants, double t) {
  return static_cast<std::size_t>(std::upper_bound(instants.begin(), instants.end(), t) - instants.begin());
}

bool within(double right, double left, const ContinuityTolerance& tol) {
  return std::abs(right - left) <= tol.abs_tol + tol.rel_tol * std::abs(left);
}

// Multiplies a trajectory by a left-continuous piecewise-constant factor that
// changes only at `instants`. `restore_jumps` keeps the factor's jumps in the
// result; otherwise the result is certified continuous there.
Trajectory scale_piecewise(const Trajectory& x, const std::vector<double>& instants, const std::vector<double>& products,
                           bool restore_jumps, const ContinuityTolerance& tol, double* max_jump) {
  for (double tk : instants) {
    if (tk <= x.t_start() || tk >= x.t_end()) continue;
    const auto segs = x.segments();
    auto it = std::lower_bound(segs.begin(), segs.end(), tk, [](const Segment& s, double v) { return s.t0 < v; });
    const bool boundary = it != segs.end() && it->t0 == tk;
    if (!boundary) throw NumericError("impulse instant t=" + std::to_string(tk) + " is not a step boundary");
  }
  auto factor = [&](double t0) {
    const std::size_t n = instants_at_or_before(instants, t0);
    return n == 0 ? 1.0 : products[n - 1];
  };
  Trajectory out(x.t_start(), factor(x.t_start()) * x.x_start_value());
  std::size_t next_jump = 0;
  const auto jumps = x.jumps();
  for (const Segment& s : x.segments()) {
    const double f = factor(s.t0);
    Segment piece{s.t0, s.t1, f * s.x0, f * s.x1, f * s.d0, f * s.d1};
    while (next_jump < jumps.size() && jumps[next_jump].t < s.t0) ++next_jump;
    const bool x_jumps = next_jump < jumps.size() && jumps[next_jump].t == s.t0;
    const bool is_instant = std::binary_search(instants.begin(), instants.end(), s.t0);
    if (s.t0 > x.t_start()) {
      const double left = out.end_value();
      if (is_instant && !restore_jumps) {
        if (max_jump) *max_jump = std::max(*max_jump, std::abs(piece.x0 - left));
        if (!within(piece.x0, left, tol)) {
          throw NumericError("continuity certification failed at t=" + std::to_string(s.t0) + ": jump " +
                             std::to_string(piece.x0 - left));
        }
        piece.x0 = left;
      } else if (x_jumps || piece.x0 != left) {
        out.add_jump(piece.x0);
      }
    }
    out.append(piece);
  }
  for (double b : x.breakpoints()) out.mark_breakpoint(b);
  return out;
}

}  // namespace

double j_factor(const ImpulseMap& map, double u) {
  if (map.is_linear()) {
    if (1.0 + map.slope() == 0.0) throw SingularImpulseError("u + I(u) vanishes identically (b = -1)");
    return 1.0 / (1.0 + map.slope());
  }
  if (u == 0.0) throw SingularImpulseError("J is undefined at u = 0");
  const double after = u + map(u);
  if (after == 0.0) throw SingularImpulseError("u + I(u) = 0 at u=" + std::to_string(u));
  return u / after;
}

double TransformedTrajectory::factor_at(double t) const {
  const auto n = static_cast<std::size_t>(std::lower_bound(instants.begin(), instants.end(), t) - instants.begin());
  return n == 0 ? 1.0 : products[n - 1];
}

double TransformedTrajectory::reconstruct(double t) const { return y.eval(t) / factor_at(t); }

TransformedTrajectory remove_impulses(const Trajectory& x, const ImpulseSchedule& schedule, double t_from,
                                      ContinuityTolerance tol) {
  TransformedTrajectory out;
  std::vector<double> j;
  if (!schedule.empty()) {
    for (long k : schedule.indices_in(t_from, x.t_end(), true, false)) {
      const double tk = schedule.instant(k);
      if (tk <= x.t_start()) continue;
      out.instants.push_back(tk);
      j.push_back(j_factor(schedule.impulse(k).map, x.eval(tk)));
    }
  }
  for (std::size_t n = 0; n < j.size(); ++n) {
    double prod = 1.0;
    for (std::size_t i = 0; i <= n; ++i) prod *= j[i];
    out.products.push_back(prod);
  }
  out.y = scale_piecewise(x, out.instants, out.products, false, tol, &out.max_jump);
  return out;
}

double removal_residual(const TransformedTrajectory& tr, const Trajectory& x, const Scenario& s,
                        std::span<const double> grid, double step) {
  const double delta = step / 4.0;
  std::vector<double> marks(x.breakpoints().begin(), x.breakpoints().end());
  marks.insert(marks.end(), tr.instants.begin(), tr.instants.end());
  std::sort(marks.begin(), marks.end());
  std::vector<double> lags(s.delays.size(), 0.0);
  const auto used = s.rhs.used_delays();
  double worst = 0.0;
  for (double t : grid) {
    auto it = std::lower_bound(marks.begin(), marks.end(), t);
    if ((it != marks.end() && *it - t <= step) || (it != marks.begin() && t - *(it - 1) <= step)) {
      throw ConfigError("grid", "sample t=" + std::to_string(t) + " lies within one step of a breakpoint");
    }
    const Trajectory& y = tr.y;
    const double dy =
        (-y.eval(t + 2 * delta) + 8 * y.eval(t + delta) - 8 * y.eval(t - delta) + y.eval(t - 2 * delta)) / (12 * delta);
    for (std::size_t i : used) lags[i] = x.eval(s.delays[i].lag_point(t));
    const double f = s.rhs.eval(t, lags, s.delays, Side::left);
    worst = std::max(worst, std::abs(dy + s.damping(t) * y.eval(t) - tr.factor_at(t) * f));
  }
  return worst;
}

double linear_impulse_product(const ImpulseSchedule& schedule, double from, double t) {
  double prod = 1.0;
  if (schedule.empty()) return prod;
  for (long k : schedule.indices_in(from, t, true, false)) prod *= 1.0 + schedule.impulse(k).map.slope();
  return prod;
}

Scenario linear_impulse_reduction(const Scenario& s, std::shared_ptr<const PeriodicTrajectory> nstar) {
  if (s.rhs.kind() != RhsKind::wazewska) throw ConfigError("rhs", "reduction applies to the Wazewska equation");
  if (!s.impulses.empty() && !s.impulses.all_linear()) {
    throw ConfigError("impulses", "reduction needs linear impulses I_k(u) = b_k u");
  }
  for (std::size_t i = 0; i < s.delays.size(); ++i) {
    if (s.delays[i].kind() != DelayKind::multiple) {
      throw ConfigError("delays[" + std::to_string(i) + "]", "reduction needs delays that are multiples of omega");
    }
  }
  Scenario out = s;
  out.rhs = Rhs::reduced_wazewska(s.rhs.wazewska_terms(), s.impulses, nstar);
  out.impulses = ImpulseSchedule();
  out.yorke = {};
  if (nstar) {
    const double t0 = s.t0;
    if (const auto* phi = std::get_if<Fn>(&s.history)) {
      const Fn f = *phi;
      out.history = Fn::custom([f, nstar, t0](double v) { return f(v) - (*nstar)(t0 + v); },
                               [f, nstar, t0](double v) { return f.derivative(v) - nstar->derivative(t0 + v); });
    } else {
      const Trajectory& h = std::get<Trajectory>(s.history);
      Trajectory shifted(h.t_start(), h.x_start_value() - (*nstar)(h.t_start()));
      for (const Segment& seg : h.segments()) {
        shifted.append({seg.t0, seg.t1, seg.x0 - nstar->right_limit(seg.t0), seg.x1 - (*nstar)(seg.t1),
                        seg.d0 - nstar->derivative_right(seg.t0), seg.d1 - nstar->derivative(seg.t1)});
      }
      out.history = shifted;
    }
  }
  return out;
}

Trajectory undo_linear_reduction(const Trajectory& y, const ImpulseSchedule& schedule) {
  std::vector<double> instants;
  std::vector<double> products;
  if (!schedule.empty()) {
    for (long k : schedule.indices_in(0.0, y.t_end(), true, false)) {
      const double tk = schedule.instant(k);
      instants.push_back(tk);
      products.push_back(linear_impulse_product(schedule, 0.0, std::nextafter(tk, tk + 1.0)));
    }
  }
  return scale_piecewise(y, instants, products, true, {}, nullptr);
}

Trajectory ratio_transform(const Trajectory& n, const PeriodicTrajectory& nstar, const ImpulseSchedule& schedule,
                           ContinuityTolerance tol) {
  if (!schedule.empty() && !schedule.all_linear()) {
    throw ConfigError("impulses",
                      "ratio transform needs linear impulses; for other maps the transformed impulses cannot "
                      "satisfy the product-boundedness hypothesis (H2)(i)");
  }
  if (!(nstar.min_value() > 0.0)) throw ConfigError("nstar", "periodic solution must be positive");
  auto ratio = [](double v, double d, double ref, double dref) {
    return std::pair{v / ref - 1.0, (d * ref - v * dref) / (ref * ref)};
  };
  Trajectory out(n.t_start(), n.x_start_value() / nstar(n.t_start()) - 1.0);
  for (const Segment& s : n.segments()) {
    const auto [y0, dy0] = ratio(s.x0, s.d0, nstar.right_limit(s.t0), nstar.derivative_right(s.t0));
    const auto [y1, dy1] = ratio(s.x1, s.d1, nstar(s.t1), nstar.derivative(s.t1));
    double start = y0;
    if (s.t0 > n.t_start()) {
      const double left = out.end_value();
      if (!within(y0, left, tol)) {
        throw NumericError("mismatched jump ratios at t=" + std::to_string(s.t0) + ": y jumps by " +
                           std::to_string(y0 - left));
      }
      start = left;
    }
    if (!(y0 > -1.0) || !(y1 > -1.0)) throw NumericError("ratio transform left y > -1 near t=" + std::to_string(s.t0));
    out.append({s.t0, s.t1, start, y1, dy0, dy1});
  }
  for (double b : n.breakpoints()) out.mark_breakpoint(b);
  return out;
}

double ratio_rate(const Scenario& s, const PeriodicTrajectory& nstar, double t) {
  double sum = 0.0;
  for (const auto& term : s.rhs.wazewska_terms()) {
    sum += term.b(t) * std::exp(-term.beta(t) * nstar(s.delays[term.delay].lag_point(t)));
  }
  return sum / nstar(t);
}

double ratio_identity_defect(const Scenario& s, const PeriodicTrajectory& nstar, double lo, double hi) {
  std::vector<double> cuts = {lo};
  double prod = 1.0;
  if (!s.impulses.empty()) {
    for (long k : s.impulses.indices_in(lo, hi, true, false)) {
      const double tk = s.impulses.instant(k);
      if (tk > lo) cuts.push_back(tk);
      prod *= 1.0 + s.impulses.impulse(k).map.slope();
    }
  }
  cuts.push_back(hi);
  double r_int = 0.0;
  auto r = [&](double t) { return ratio_rate(s, nstar, t); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // r is left-continuous; keep the quadrature nodes off the jump itself.
    const double a = cuts[i];
    const double b = cuts[i + 1];
    auto g = [&](double t) { return t == a ? ratio_rate(s, nstar, std::nextafter(a, b)) : r(t); };
    r_int += quad::simpson_richardson(g, a, b, 1e-14, 1e-13, 64, 1 << 16).value;
  }
  const double lhs = std::exp(-r_int);
  const double rhs = std::exp(-s.damping.integral(lo, hi)) * nstar(lo) / nstar(hi) * prod;
  return std::abs(lhs - rhs) / std::abs(rhs);
}

}  // namespace idde
