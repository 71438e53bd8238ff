#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace idde {

/// Cubic Hermite piece on [t0, t1]: endpoint values and derivatives.
struct Segment {
  double t0 = 0.0;
  double t1 = 0.0;
  double x0 = 0.0;
  double x1 = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;

  double value(double t) const;
  double slope(double t) const;
  /// max of sign * p(t) over [lo, hi] (subset of [t0, t1]); endpoints plus
  /// interior critical points of the cubic.
  double sup(double lo, double hi, double sign) const;
};

struct Jump {
  double t = 0.0;
  double left = 0.0;
  double right = 0.0;
};

/// Piecewise-smooth, left-continuous function with recorded jumps.
///
/// Segments are contiguous. A jump at t is stored between the segment ending
/// at t (left value) and the one starting at t (right value); eval() returns
/// the left value there.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double t_start, double x_start) : t_start_(t_start), x_start_(x_start) {}

  double t_start() const { return t_start_; }
  double x_start_value() const { return x_start_; }
  double t_end() const { return segments_.empty() ? t_start_ : segments_.back().t1; }
  /// State at t_end after any jump recorded there.
  double end_value() const;

  /// `seg.t0` must equal t_end() and `seg.x0` must equal end_value().
  void append(const Segment& seg);
  /// Records x(t_end+) = right. At most one jump per instant.
  void add_jump(double right);
  /// Overwrites d1 of the last segment (slopes that depend on the new endpoint).
  void set_end_slope(double d1) { segments_.back().d1 = d1; }
  void mark_breakpoint(double t);

  double eval(double t) const;
  double eval_right_limit(double t) const;
  /// Left derivative (right derivative at t_start).
  double derivative(double t) const;
  double derivative_right(double t) const;

  /// M(sign * x) over [t - tau, t]: max(0, sup sign*x), including both sides
  /// of every jump inside the window.
  double yorke_sup(double t, double tau, int sign) const;
  /// sup of |x| over [lo, hi] with both jump sides.
  double sup_abs(double lo, double hi) const;

  bool has_jump_at(double t) const;
  std::span<const Segment> segments() const { return segments_; }
  std::span<const Jump> jumps() const { return jumps_; }
  std::span<const double> breakpoints() const { return breakpoints_; }

  /// Drops every segment lying entirely before t (used by long period-map
  /// iterations that only need a sliding window).
  void trim_before(double t);

  /// Shifted and scaled copy: y(t + shift) = scale * x(t).
  Trajectory transformed(double shift, double scale) const;

  /// `t,value,side` rows at every step endpoint; jumps emit a left and a right row.
  void write_csv(std::ostream& out, bool header = true) const;

 private:
  std::size_t segment_left(double t) const;
  std::size_t segment_right(double t) const;
  void check_domain(double& t) const;

  double t_start_ = 0.0;
  double x_start_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<Jump> jumps_;
  std::vector<double> breakpoints_;
};

/// One period of an omega-periodic function stored as a Trajectory on
/// [0, omega], evaluated through its periodic extension.
class PeriodicTrajectory {
 public:
  PeriodicTrajectory() = default;
  PeriodicTrajectory(Trajectory period, double omega);

  double omega() const { return omega_; }
  const Trajectory& period() const { return period_; }

  double operator()(double t) const;
  double right_limit(double t) const;
  double derivative(double t) const;
  double derivative_right(double t) const;

  /// Maximum over one period including both jump sides.
  double max_value() const;
  double min_value() const;

  /// Periodic extension materialized on [lo, hi] (segments copied, jumps kept).
  Trajectory extended(double lo, double hi) const;

 private:
  // Returns the reduced time and writes the period index.
  double reduce_left(double t) const;
  double reduce_right(double t) const;

  Trajectory period_;
  double omega_ = 1.0;
};

}  // namespace idde
