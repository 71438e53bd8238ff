// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <random>
#include <sstream>

#include "idde/config.hpp"
#include "idde/criteria.hpp"
#include "idde/integrator.hpp"
#include "idde/reference.hpp"
#include "idde/reproduce.hpp"
#include "idde/scenarios.hpp"
#include "idde/transforms.hpp"
#include "idde/wazewska.hpp"
#include "support.hpp"

using namespace idde;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Criteria reports of the bundled set, shared by several checks.
struct Evaluated {
  const BundledScenario* bundled = nullptr;
  Scenario scenario;
  std::optional<PeriodicSolution> periodic;
  std::vector<CriterionResult> report;
};

std::vector<Evaluated> evaluate_bundled() {
  std::vector<std::future<Evaluated>> jobs;
  for (const auto& b : bundled_scenarios()) {
    jobs.push_back(std::async(std::launch::async, [&b] {
      Evaluated e;
      e.bundled = &b;
      e.scenario = b.build();
      if (b.family == ScenarioFamily::wazewska) {
        e.periodic = find_periodic(WazewskaModel(e.scenario));
        e.report = check_wazewska_criteria(e.scenario, e.periodic->nstar);
      } else {
        e.report = check_zero_criteria(e.scenario);
      }
      return e;
    }));
  }
  std::vector<Evaluated> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// 1
Outcome integrator_order() {
  const Scenario s = build_scenario(R"({"damping": 1, "rhs": {"kind": "zero"}, "history": 1})");
  auto err = [&](double h) {
    const Trajectory tr = integrate(s, {h}, 2.0);
    double worst = 0.0;
    for (const Segment& seg : tr.segments()) worst = std::max(worst, std::abs(seg.x1 - std::exp(-seg.t1)));
    return worst;
  };
  Outcome o;
  for (double h : {1e-2, 5e-3}) {
    const double ratio = err(h) / err(h / 2);
    o.ok = o.ok && ratio >= 12.0 && ratio <= 20.0;
    o.detail += "ratio(h=" + fmt(h) + ") = " + fmt(ratio) + " ";
  }
  return o;
}

// 2
Outcome example_fidelity() {
  const Scenario s = bundled("example-2-22").build();
  const Trajectory x = integrate(s, {1e-3}, 50.0);
  double worst = 0.0;
  for (int i = 0; i <= 50000; ++i) {
    const double t = 50.0 * i / 50000;
    const double exact = std::exp(1.0 / (t + 1.0));
    worst = std::max(worst, std::abs(x.eval(t) - exact) / exact);
  }
  const double end = x.eval(50.0);
  return {worst < 1e-6 && end >= 0.99, "max relative error " + fmt(worst) + ", x(50) = " + fmt(end)};
}

// 3
Outcome lemma_certification() {
  std::mt19937_64 rng(2101);
  double jump = 0.0;
  double residual = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Scenario s = testing::random_impulsive(rng);
    const Trajectory x = integrate(s, {1e-3}, 5.0);
    const auto tr = remove_impulses(x, s.impulses);
    jump = std::max(jump, tr.max_jump);
    const auto grid = testing::interior_grid(x, 0.1, 5.0, 400, 1e-3);
    residual = std::max(residual, removal_residual(tr, x, s, grid, 1e-3));
  }
  return {jump < 1e-8 && residual < 1e-4, "20 runs, max jump " + fmt(jump) + ", max residual " + fmt(residual)};
}

// 4
Outcome transform_equivalence() {
  std::mt19937_64 rng(2102);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Scenario s = testing::random_linear_model(rng);
    const Trajectory direct = integrate(s, {1e-3}, 5.0);
    const Trajectory back = undo_linear_reduction(integrate(linear_impulse_reduction(s), {1e-3}, 5.0), s.impulses);
    worst = std::max(worst, testing::sup_difference(direct, back, 0.0, 5.0, 20000));
  }
  return {worst < 1e-6, "5 models over 5 periods, sup difference " + fmt(worst)};
}

constexpr long kPanels = 1'000'000;

// Left sums for the COR3_2 quantities.
double riemann_cor32_inner(const Scenario& s, const Fn& b, double t, double len) {
  const double h = len / kPanels;
  double acc = 0.0;
  double cum = 0.0;
  for (long i = 0; i < kPanels; ++i) {
    const double u = i * h;
    acc += b(t + u) * std::exp(cum) * h;
    cum += s.damping(t + u) * h;
  }
  return acc;
}

double riemann_plain(const std::function<double(double)>& f, double lo, double hi) {
  const double h = (hi - lo) / kPanels;
  double acc = 0.0;
  for (long i = 0; i < kPanels; ++i) acc += f(lo + i * h) * h;
  return acc;
}

// 5
Outcome quadrature_oracle(const std::vector<Evaluated>& all) {
  struct Item {
    std::string label;
    double value;
    std::function<double()> oracle;
  };
  std::vector<Item> items;
  for (const auto& e : all) {
    const Scenario& s = e.scenario;
    const PeriodicTrajectory* n = e.periodic ? &e.periodic->nstar : nullptr;
    for (const auto& r : e.report) {
      std::optional<AlphaVariant> v;
      if (r.id == CriterionId::H5) v = AlphaVariant::multi;
      if (r.id == CriterionId::SIGMA_YAN) v = AlphaVariant::sigma_yan;
      if (r.id == CriterionId::THM3_1) v = AlphaVariant::thm3_1;
      if (r.id == CriterionId::THM3_5) v = AlphaVariant::thm3_5;
      const std::string tag = e.bundled->id + "/" + to_string(r.id);
      if (v && *v == AlphaVariant::sigma_yan && r.has_value("sigma")) {
        items.push_back({tag + "/sigma", r.value("sigma"),
                         [&s, v, n, t = r.value("t_sup")] { return reference::riemann_alpha(s, s.yorke, *v, 1, t, kPanels, n); }});
      } else if (v && r.has_value("alpha1")) {
        for (int j : {1, 2}) {
          const double t = r.value(j == 1 ? "t_sup1" : "t_sup2");
          items.push_back({tag + "/alpha" + std::to_string(j), r.value(j == 1 ? "alpha1" : "alpha2"),
                           [&s, v, n, j, t] { return reference::riemann_alpha(s, s.yorke, *v, j, t, kPanels, n); }});
        }
      }
      if (r.id == CriterionId::COR3_2 && r.has_value("alpha1")) {
        const auto& term = s.rhs.wazewska_terms().front();
        const int m = s.delays[term.delay].multiple_m();
        const double w = *s.omega;
        const double nbar = n->max_value();
        items.push_back({tag + "/alpha1", r.value("alpha1"), [&s, m, w, nbar] {
                           return nbar * -std::expm1(-m * riemann_plain([&s](double u) { return s.damping(u); }, 0.0, w));
                         }});
        items.push_back({tag + "/alpha2", r.value("alpha2"), [&s, &term, m, w, t = r.value("t_sup2")] {
                           const double ma = m * riemann_plain([&s](double u) { return s.damping(u); }, 0.0, w);
                           return std::exp(-ma) * riemann_cor32_inner(s, term.b, t, m * w);
                         }});
        items.push_back({tag + "/sigma", r.value("graef_sigma"), [&term, n, m, w] {
                           return riemann_plain([&](double u) { return term.b(u) * std::exp(-(*n)(u)); }, 0.0, m * w);
                         }});
      }
    }
  }
  std::vector<std::future<double>> jobs;
  for (const auto& it : items) jobs.push_back(std::async(std::launch::async, it.oracle));
  Outcome o;
  double worst = 0.0;
  std::string worst_label;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double q = jobs[i].get();
    const double rel = std::abs(items[i].value - q) / std::max(std::abs(q), 1e-300);
    if (rel > worst) {
      worst = rel;
      worst_label = items[i].label;
    }
    if (!(rel < 1e-6)) {
      o.ok = false;
      o.detail += items[i].label + " rel " + fmt(rel) + "; ";
    }
  }
  o.detail += std::to_string(items.size()) + " values, worst relative difference " + fmt(worst) + " (" + worst_label + ")";
  return o;
}

// 6
Outcome b_exactness() {
  std::mt19937_64 rng(2106);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double omega = 0.5 + 2.0 * u(rng);
    const int p = 1 + static_cast<int>(4 * u(rng));
    std::vector<Impulse> base;
    for (int k = 0; k < p; ++k) {
      base.push_back({omega * (k + 0.2 + 0.6 * u(rng)) / p, ImpulseMap::linear(-0.8 + 2.0 * u(rng)), {}});
    }
    const ImpulseSchedule sch(base, omega);
    const double tau = 3.0 * omega * u(rng);
    const double t = 10.0 * u(rng);
    const double b = big_B(sch, DelaySpec::constant(tau), t);
    const double brute = reference::brute_force_B(sch, tau, t);
    worst = std::max(worst, std::abs(b - brute) / brute);
  }
  return {worst <= 1e-12, "1000 instances, worst relative difference " + fmt(worst)};
}

// 7
Outcome periodic_quality() {
  const Scenario s = bundled("wazewska-constant").build();
  const PeriodicSolution sol = find_periodic(WazewskaModel(s));
  // a N = b e^{-beta N} with a = 1, b = 0.5, beta = 1.
  const double root = reference::find_root([](double n) { return n * std::exp(n) - 0.5; }, 0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) worst = std::max(worst, std::abs(sol.nstar(i / 1000.0) - root));
  return {worst < 1e-8 && sol.periodicity_residual < 1e-8,
          "|N* - root| = " + fmt(worst) + ", periodicity residual " + fmt(sol.periodicity_residual)};
}

// 8
Outcome theorem_consistency(const std::vector<Evaluated>& all) {
  VerifyOptions vo;
  vo.scales = {0.1, 0.5, 2.0, 10.0};
  vo.horizon_periods = 200;
  vo.tol = 1e-6;
  std::vector<std::pair<std::string, std::future<AttractivityReport>>> jobs;
  for (const auto& e : all) {
    if (!attractivity_established(e.report)) continue;
    jobs.emplace_back(e.bundled->id, std::async(std::launch::async, [&e, vo] {
                        if (e.periodic) return verify_attractivity(WazewskaModel(e.scenario), e.periodic->nstar, vo);
                        return verify_attractivity(e.scenario, nullptr, e.scenario.omega.value_or(1.0), vo);
                      }));
  }
  Outcome o;
  std::string names;
  for (auto& [id, job] : jobs) {
    const bool attracting = job.get().attracting();
    o.ok = o.ok && attracting;
    names += (names.empty() ? "" : ", ") + id + (attracting ? "" : " (NOT attracting)");
  }
  o.ok = o.ok && !jobs.empty();
  o.detail = std::to_string(jobs.size()) + " scenarios with established criteria: " + names;
  return o;
}

// 9
Outcome criteria_properties() {
  Outcome o;
  double homog = 0.0;
  double equal = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (const std::string id : {"constant-yorke", "impulsive-yorke", "boundary-alpha-below"}) {
    json doc = bundled(id).doc;
    const Scenario s = scenario_from_json(doc);
    doc["yorke"][0]["lambda2"] = 3.7 * doc["yorke"][0]["lambda2"].get<double>();
    const Scenario s3 = scenario_from_json(doc);
    const CriterionResult r = alpha_integrals(s, s.yorke, AlphaVariant::multi);
    const CriterionResult r3 = alpha_integrals(s3, s3.yorke, AlphaVariant::multi);
    const CriterionResult y = alpha_integrals(s, s.yorke, AlphaVariant::sigma_yan);
    homog = std::max(homog, std::abs(r3.value("alpha2") - 3.7 * r.value("alpha2")) / (3.7 * r.value("alpha2")));
    equal = std::max(equal, std::abs(r.value("alpha1") - r.value("alpha2")) / r.value("alpha2"));
    margin = std::min(margin, y.value("sigma") - r.value("alpha2"));
  }
  o.ok = homog <= 1e-12 && equal <= 1e-12 && margin > 0.0;
  o.detail = "alpha2 homogeneity defect " + fmt(homog) + ", |alpha1 - alpha2| rel " + fmt(equal) +
             ", min(sigma - alpha2) " + fmt(margin);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10
Outcome determinism() {
  const fs::path root = fs::current_path() / "acceptance_outputs";
  fs::remove_all(root);
  std::vector<std::future<void>> jobs;
  for (const char* run : {"first", "second"}) {
    for (const auto& c : reproduce_cases()) {
      jobs.push_back(std::async(std::launch::async, [=] { reproduce(c, (root / run / c).string()); }));
    }
  }
  for (auto& j : jobs) j.get();
  Outcome o;
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "first")) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = root / "second" / fs::relative(entry.path(), root / "first");
    ++files;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      o.ok = false;
      o.detail += fs::relative(entry.path(), root).string() + " differs; ";
    }
  }
  o.ok = o.ok && files == 5 * static_cast<int>(reproduce_cases().size());
  o.detail += std::to_string(files) + " files compared across two runs";
  return o;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  struct Entry {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::shared_future<std::vector<Evaluated>> shared = std::async(std::launch::async, evaluate_bundled).share();
  auto needs_shared = [&shared](auto f) { return [&shared, f] { return f(shared.get()); }; };
  const std::vector<Entry> entries = {
      {1, "integrator order", integrator_order},
      {2, "example 2.22 fidelity", example_fidelity},
      {3, "impulse removal certification", lemma_certification},
      {4, "linear-impulse reduction equivalence", transform_equivalence},
      {5, "quadrature oracle", needs_shared(quadrature_oracle)},
      {6, "B(t) exactness", b_exactness},
      {7, "periodic solution quality", periodic_quality},
      {8, "theorem consistency", needs_shared(theorem_consistency)},
      {9, "criteria homogeneity and ordering", criteria_properties},
      {10, "determinism", determinism},
  };

  std::vector<std::future<Outcome>> jobs;
  for (const auto& e : entries) {
    jobs.push_back(std::async(std::launch::async, [&e]() -> Outcome {
      try {
        return e.run();
      } catch (const std::exception& ex) {
        return {false, std::string("exception: ") + ex.what()};
      }
    }));
  }
  int failed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Outcome o = jobs[i].get();
    failed += o.ok ? 0 : 1;
    std::printf("%s  [%d] %s: %s\n", o.ok ? "PASS" : "FAIL", entries[i].number, entries[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(entries.size()) - failed, entries.size(), secs);
  return failed == 0 ? 0 : 1;
}
