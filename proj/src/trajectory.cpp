#include "idde/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "idde/errors.hpp"

namespace idde {

namespace {

double domain_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

void write_row(std::ostream& out, double t, double v, const char* side) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", t, v, side);
  out << buf;
}

}  // namespace

double Segment::value(double t) const {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * h * d1;
}

double Segment::slope(double t) const {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return (6 * s2 - 6 * s) * (x0 - x1) / h + (3 * s2 - 4 * s + 1) * d0 + (3 * s2 - 2 * s) * d1;
}

double Segment::sup(double lo, double hi, double sign) const {
  double best = std::max(sign * value(lo), sign * value(hi));
  const double h = t1 - t0;
  // p(s) = c0 + c1 s + c2 s^2 + c3 s^3 on s in [0, 1]
  const double c1 = h * d0;
  const double c2 = 3 * (x1 - x0) - 2 * h * d0 - h * d1;
  const double c3 = 2 * (x0 - x1) + h * d0 + h * d1;
  const double s_lo = (lo - t0) / h;
  const double s_hi = (hi - t0) / h;
  auto consider = [&](double s) {
    if (s > s_lo && s < s_hi) best = std::max(best, sign * (x0 + s * (c1 + s * (c2 + s * c3))));
  };
  // p'(s) = c1 + 2 c2 s + 3 c3 s^2
  const double qa = 3 * c3;
  const double qb = 2 * c2;
  const double qc = c1;
  const double scale = std::abs(qa) + std::abs(qb) + std::abs(qc);
  if (scale == 0.0) return best;
  if (std::abs(qa) <= 1e-14 * scale) {
    if (qb != 0.0) consider(-qc / qb);
    return best;
  }
  const double disc = qb * qb - 4 * qa * qc;
  if (disc < 0) return best;
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  if (q != 0.0) {
    consider(q / qa);
    consider(qc / q);
  } else {
    consider(0.0);
  }
  return best;
}

double Trajectory::end_value() const {
  if (!jumps_.empty() && jumps_.back().t == t_end()) return jumps_.back().right;
  return segments_.empty() ? x_start_ : segments_.back().x1;
}

void Trajectory::append(const Segment& seg) {
  if (seg.t0 != t_end()) {
    throw Error("Trajectory::append: segment starts at " + std::to_string(seg.t0) + ", expected " +
                std::to_string(t_end()));
  }
  if (!(seg.t1 > seg.t0)) throw Error("Trajectory::append: empty segment");
  segments_.push_back(seg);
}

void Trajectory::add_jump(double right) {
  const double t = t_end();
  if (!jumps_.empty() && jumps_.back().t == t) throw Error("Trajectory::add_jump: jump already recorded");
  jumps_.push_back({t, end_value(), right});
}

void Trajectory::mark_breakpoint(double t) {
  if (breakpoints_.empty() || breakpoints_.back() < t) {
    breakpoints_.push_back(t);
  } else if (std::find(breakpoints_.begin(), breakpoints_.end(), t) == breakpoints_.end()) {
    breakpoints_.insert(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t), t);
  }
}

void Trajectory::check_domain(double& t) const {
  const double lo = t_start();
  const double hi = t_end();
  if (t < lo - domain_tol(lo) || t > hi + domain_tol(hi) || std::isnan(t)) {
    throw DomainError("trajectory evaluated at t=" + std::to_string(t), lo, hi);
  }
  t = std::clamp(t, lo, hi);
}

std::size_t Trajectory::segment_left(double t) const {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                             [](const Segment& s, double v) { return s.t1 < v; });
  if (it == segments_.end()) --it;
  return static_cast<std::size_t>(it - segments_.begin());
}

std::size_t Trajectory::segment_right(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const Segment& s) { return v < s.t1; });
  if (it == segments_.end()) --it;
  return static_cast<std::size_t>(it - segments_.begin());
}

double Trajectory::eval(double t) const {
  check_domain(t);
  if (segments_.empty() || t <= t_start_) return x_start_;
  return segments_[segment_left(t)].value(t);
}

double Trajectory::eval_right_limit(double t) const {
  check_domain(t);
  if (has_jump_at(t)) {
    return std::lower_bound(jumps_.begin(), jumps_.end(), t, [](const Jump& j, double v) { return j.t < v; })->right;
  }
  if (segments_.empty()) return x_start_;
  if (t >= t_end()) return segments_.back().x1;
  return segments_[segment_right(t)].value(t);
}

double Trajectory::derivative(double t) const {
  check_domain(t);
  if (segments_.empty()) return 0.0;
  if (t <= t_start_) return segments_.front().d0;
  return segments_[segment_left(t)].slope(t);
}

double Trajectory::derivative_right(double t) const {
  check_domain(t);
  if (segments_.empty()) return 0.0;
  if (t >= t_end()) return segments_.back().d1;
  return segments_[segment_right(t)].slope(t);
}

bool Trajectory::has_jump_at(double t) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t, [](const Jump& j, double v) { return j.t < v; });
  return it != jumps_.end() && it->t == t;
}

double Trajectory::yorke_sup(double t, double tau, int sign) const {
  double lo = t - tau;
  double hi = t;
  check_domain(lo);
  check_domain(hi);
  const double sg = sign >= 0 ? 1.0 : -1.0;
  double best = sg * eval(hi);
  if (tau > 0.0 && !segments_.empty()) {
    best = std::max(best, sg * eval(lo));
    for (std::size_t i = segment_left(lo); i < segments_.size() && segments_[i].t0 < hi; ++i) {
      const Segment& s = segments_[i];
      const double a = std::max(lo, s.t0);
      const double b = std::min(hi, s.t1);
      if (b < a) continue;
      best = std::max(best, s.sup(a, b, sg));
    }
  }
  return std::max(0.0, best);
}

double Trajectory::sup_abs(double lo, double hi) const {
  return std::max(yorke_sup(hi, hi - lo, +1), yorke_sup(hi, hi - lo, -1));
}

void Trajectory::trim_before(double t) {
  auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                             [](const Segment& s, double v) { return s.t1 < v; });
  if (it == segments_.begin() || it == segments_.end()) return;
  segments_.erase(segments_.begin(), it);
  t_start_ = segments_.front().t0;
  x_start_ = segments_.front().x0;
  jumps_.erase(jumps_.begin(), std::lower_bound(jumps_.begin(), jumps_.end(), t_start_,
                                                [](const Jump& j, double v) { return j.t <= v; }));
  breakpoints_.erase(breakpoints_.begin(), std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t_start_));
}

Trajectory Trajectory::transformed(double shift, double scale) const {
  Trajectory out(t_start_ + shift, scale * x_start_);
  std::size_t jump = 0;
  for (const Segment& s : segments_) {
    while (jump < jumps_.size() && jumps_[jump].t < s.t0) ++jump;
    if (jump < jumps_.size() && jumps_[jump].t == s.t0) {
      out.add_jump(scale * jumps_[jump].right);
      ++jump;
    }
    out.append({out.t_end(), s.t1 + shift, scale * s.x0, scale * s.x1, scale * s.d0, scale * s.d1});
  }
  if (jump < jumps_.size() && jumps_[jump].t == t_end()) out.add_jump(scale * jumps_[jump].right);
  for (double b : breakpoints_) out.mark_breakpoint(b + shift);
  return out;
}

void Trajectory::write_csv(std::ostream& out, bool header) const {
  if (header) out << "t,value,side\n";
  auto emit_point = [&](double t, double left) {
    if (has_jump_at(t)) {
      write_row(out, t, left, "left");
      write_row(out, t, eval_right_limit(t), "right");
    } else {
      write_row(out, t, left, "interior");
    }
  };
  emit_point(t_start_, x_start_);
  for (const Segment& s : segments_) emit_point(s.t1, s.x1);
}

PeriodicTrajectory::PeriodicTrajectory(Trajectory period, double omega) : period_(std::move(period)), omega_(omega) {
  if (!(omega > 0.0)) throw ConfigError("omega", "period must be positive");
  if (period_.t_start() != 0.0 || std::abs(period_.t_end() - omega) > 1e-12 * std::max(1.0, omega)) {
    throw ConfigError("periodic_solution", "stored period must cover [0, omega]");
  }
}

double PeriodicTrajectory::reduce_left(double t) const {
  const double j = std::ceil(t / omega_) - 1.0;
  return std::clamp(t - j * omega_, 0.0, period_.t_end());
}

double PeriodicTrajectory::reduce_right(double t) const {
  const double j = std::floor(t / omega_);
  return std::clamp(t - j * omega_, 0.0, period_.t_end());
}

double PeriodicTrajectory::operator()(double t) const { return period_.eval(reduce_left(t)); }

double PeriodicTrajectory::right_limit(double t) const {
  const double r = reduce_right(t);
  return period_.eval_right_limit(r);
}

double PeriodicTrajectory::derivative(double t) const { return period_.derivative(reduce_left(t)); }

double PeriodicTrajectory::derivative_right(double t) const { return period_.derivative_right(reduce_right(t)); }

double PeriodicTrajectory::max_value() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Segment& s : period_.segments()) best = std::max(best, s.sup(s.t0, s.t1, 1.0));
  for (const Jump& j : period_.jumps()) best = std::max({best, j.left, j.right});
  return best;
}

double PeriodicTrajectory::min_value() const {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : period_.segments()) best = std::min(best, -s.sup(s.t0, s.t1, -1.0));
  for (const Jump& j : period_.jumps()) best = std::min({best, j.left, j.right});
  return best;
}

Trajectory PeriodicTrajectory::extended(double lo, double hi) const {
  Trajectory out(lo, (*this)(lo));
  const auto segs = period_.segments();
  const double first = std::floor(lo / omega_);
  const double last = std::ceil(hi / omega_);
  const double join_tol = 1e-14;
  for (double j = first; j < last; j += 1.0) {
    const double base = j * omega_;
    for (const Segment& s : segs) {
      const double a = base + s.t0;
      const double b = base + s.t1;
      if (b <= out.t_end() || a >= hi) continue;
      const double t0 = out.t_end();
      const double t1 = std::min(b, hi);
      if (t1 - t0 <= 1e-13 * std::max(1.0, std::abs(t1))) continue;
      const bool clip_left = a < t0 - 1e-13 * std::max(1.0, std::abs(t0));
      const bool clip_right = b > hi;
      Segment piece;
      piece.t0 = t0;
      piece.t1 = t1;
      piece.x0 = clip_left ? s.value(t0 - base) : s.x0;
      piece.d0 = clip_left ? s.slope(t0 - base) : s.d0;
      piece.x1 = clip_right ? s.value(t1 - base) : s.x1;
      piece.d1 = clip_right ? s.slope(t1 - base) : s.d1;
      const double prev = out.end_value();
      if (std::abs(piece.x0 - prev) > join_tol * (1.0 + std::abs(prev))) {
        out.add_jump(piece.x0);
      } else {
        piece.x0 = prev;
      }
      out.append(piece);
    }
  }
  return out;
}

}  // namespace idde
