#pragma once

#include <cmath>
#include <functional>
#include <span>

namespace idde::quad {

/// Composite Simpson over [lo, hi] with `panels` (even) subintervals.
template <typename F>
double simpson(const F& f, double lo, double hi, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (hi - lo) / panels;
  double odd = 0.0;
  double even = 0.0;
  for (int j = 1; j < panels; ++j) {
    const double v = f(lo + j * h);
    (j % 2 ? odd : even) += v;
  }
  return h / 3.0 * (f(lo) + 4.0 * odd + 2.0 * even + f(hi));
}

struct SimpsonResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Composite Simpson with panel doubling until two successive estimates agree
/// to `abs_tol + rel_tol * |value|`. The returned value is the Richardson
/// extrapolant of the last pair.
template <typename F>
SimpsonResult simpson_richardson(const F& f, double lo, double hi, double abs_tol, double rel_tol,
                                 int start_panels = 16, int max_panels = 1 << 14) {
  SimpsonResult r;
  if (hi <= lo) {
    r.converged = true;
    return r;
  }
  int n = start_panels;
  double coarse = simpson(f, lo, hi, n);
  while (true) {
    const double fine = simpson(f, lo, hi, 2 * n);
    const double diff = fine - coarse;
    r.value = fine + diff / 15.0;
    r.error_estimate = std::abs(diff);
    r.panels = 2 * n;
    if (r.error_estimate <= abs_tol + rel_tol * std::abs(r.value)) {
      r.converged = true;
      return r;
    }
    if (2 * n >= max_panels) return r;
    n *= 2;
    coarse = fine;
  }
}

/// Adaptive Simpson (recursive bisection) for smooth integrands.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol,
                        int max_depth = 40);

}  // namespace idde::quad
