#pragma once

// Seeded scenario generators shared by the unit tests and the acceptance run.

#include <algorithm>
#include <random>

#include "idde/config.hpp"

namespace idde::testing {

inline json random_trig(std::mt19937_64& rng, double mean_lo, double mean_hi, double amp) {
  std::uniform_real_distribution<double> m(mean_lo, mean_hi);
  std::uniform_real_distribution<double> a(-amp, amp);
  return {{"kind", "trig"}, {"period", 1.0}, {"mean", m(rng)}, {"cos", {a(rng)}}, {"sin", {a(rng)}}};
}

inline std::vector<double> random_instants(std::mt19937_64& rng, int p) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<double> ts;
  while (static_cast<int>(ts.size()) < p) {
    const double t = u(rng);
    if (std::all_of(ts.begin(), ts.end(), [t](double s) { return std::abs(s - t) > 0.05; })) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  return ts;
}

/// Wazewska equation with period 1, mixed delays and linear or tabulated
/// (nonlinear, positive-preserving) impulses.
inline Scenario random_impulsive(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(1, 3);
  json doc;
  doc["omega"] = 1.0;
  doc["damping"] = random_trig(rng, 0.8, 1.5, 0.3);
  doc["delays"] = {{{"kind", "constant"}, {"tau", 0.3 + 1.2 * u(rng)}}, {{"kind", "multiple"}, {"m", 1}}};
  json terms = json::array();
  terms.push_back({{"b", random_trig(rng, 0.5, 1.2, 0.3)}, {"beta", 0.5 + u(rng)}, {"delay", 0}});
  if (u(rng) < 0.5) terms.push_back({{"b", 0.2 + 0.3 * u(rng)}, {"beta", 0.5 + u(rng)}, {"delay", 1}});
  doc["rhs"] = {{"kind", "wazewska"}, {"terms", terms}};
  doc["impulses"] = json::array();
  for (double t : random_instants(rng, pick(rng))) {
    if (u(rng) < 0.5) {
      doc["impulses"].push_back({{"t", t}, {"kind", "linear"}, {"params", {{"b", -0.4 + 0.8 * u(rng)}}}});
    } else {
      std::vector<double> us = {0.0, 0.5, 1.0, 2.0, 4.0};
      std::vector<double> vs;
      for (double x : us) vs.push_back((-0.3 + 0.6 * u(rng)) * x);
      doc["impulses"].push_back({{"t", t}, {"kind", "tabulated"}, {"params", {{"u", us}, {"values", vs}}}});
    }
  }
  doc["history"] = 0.3 + 1.2 * u(rng);
  return scenario_from_json(doc);
}

/// Model with linear impulses b_k > -1 and delays m_i omega.
inline Scenario random_linear_model(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(1, 3);
  json doc;
  doc["omega"] = 1.0;
  doc["damping"] = random_trig(rng, 0.8, 1.5, 0.3);
  doc["delays"] = {{{"kind", "multiple"}, {"m", 1}}, {{"kind", "multiple"}, {"m", 2}}};
  json terms = json::array();
  terms.push_back({{"b", random_trig(rng, 0.5, 1.2, 0.3)}, {"beta", random_trig(rng, 0.7, 1.3, 0.2)}, {"delay", 0}});
  if (u(rng) < 0.5) terms.push_back({{"b", 0.2 + 0.3 * u(rng)}, {"beta", 0.5 + u(rng)}, {"delay", 1}});
  doc["rhs"] = {{"kind", "wazewska"}, {"terms", terms}};
  doc["impulses"] = json::array();
  for (double t : random_instants(rng, pick(rng))) {
    doc["impulses"].push_back({{"t", t}, {"kind", "linear"}, {"params", {{"b", -0.4 + 0.7 * u(rng)}}}});
  }
  doc["history"] = 0.3 + 1.2 * u(rng);
  return scenario_from_json(doc);
}

/// Sample points of [lo, hi] kept farther than `gap` from every breakpoint.
inline std::vector<double> interior_grid(const Trajectory& tr, double lo, double hi, int n, double gap) {
  std::vector<double> marks(tr.breakpoints().begin(), tr.breakpoints().end());
  for (const Jump& j : tr.jumps()) marks.push_back(j.t);
  std::sort(marks.begin(), marks.end());
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * (i + 0.5) / n;
    auto it = std::lower_bound(marks.begin(), marks.end(), t);
    const bool near_next = it != marks.end() && *it - t <= 2 * gap;
    const bool near_prev = it != marks.begin() && t - *(it - 1) <= 2 * gap;
    if (!near_next && !near_prev) out.push_back(t);
  }
  return out;
}

/// sup |a - b| over dense samples and both sides of every jump of `a`.
inline double sup_difference(const Trajectory& a, const Trajectory& b, double lo, double hi, int n) {
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    worst = std::max(worst, std::abs(a.eval(t) - b.eval(t)));
  }
  for (const Jump& j : a.jumps()) {
    if (j.t < lo || j.t > hi) continue;
    worst = std::max(worst, std::abs(j.left - b.eval(j.t)));
    if (j.t < hi) worst = std::max(worst, std::abs(j.right - b.eval_right_limit(j.t)));
  }
  return worst;
}

}  // namespace idde::testing
