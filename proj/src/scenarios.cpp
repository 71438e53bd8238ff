#include "idde/scenarios.hpp"

#include "idde/errors.hpp"

namespace idde {

namespace {

// Linear negative feedback x' = -a x - lambda x(t - tau) as a piecewise-linear g.
json feedback(double lambda) {
  return {{"kind", "piecewise_linear"},
          {"terms", {{{"delay", 0}, {"breakpoints", {-1.0, 1.0}}, {"values", {lambda, -lambda}}}}}};
}

json yorke(double l1, double l2) { return json::array({{{"delay", 0}, {"lambda1", l1}, {"lambda2", l2}}}); }

json trig(double mean, std::vector<double> cos, std::vector<double> sin) {
  return {{"kind", "trig"}, {"period", 1.0}, {"mean", mean}, {"cos", cos}, {"sin", sin}};
}

json linear_impulse(double t, double b) { return {{"t", t}, {"kind", "linear"}, {"params", {{"b", b}}}}; }

std::vector<BundledScenario> make() {
  std::vector<BundledScenario> out;

  out.push_back({"constant-yorke", "x' = -x - 0.5 x(t - 1), no impulses", ScenarioFamily::zero_solution,
                 {{"name", "constant-yorke"},
                  {"omega", 1.0},
                  {"damping", 1.0},
                  {"delays", {{{"kind", "constant"}, {"tau", 1.0}}}},
                  {"rhs", feedback(0.5)},
                  {"history", 1.0},
                  {"yorke", yorke(0.5, 0.5)}}});

  out.push_back({"impulsive-yorke", "periodic damping, delayed feedback and two linear impulses per period",
                 ScenarioFamily::zero_solution,
                 {{"name", "impulsive-yorke"},
                  {"omega", 1.0},
                  {"damping", trig(1.0, {0.3}, {})},
                  {"delays", {{{"kind", "constant"}, {"tau", 0.8}}}},
                  {"rhs", feedback(0.6)},
                  {"impulses", {linear_impulse(0.3, -0.2), linear_impulse(0.7, 0.1)}},
                  {"history", 1.0},
                  {"yorke", yorke(0.6, 0.6)}}});

  out.push_back({"example-2-22", "a = 1/(t+1)^2, g(x) = -x for x <= 0 and 0 otherwise, tau = 0.5",
                 ScenarioFamily::zero_solution,
                 {{"name", "example-2-22"},
                  {"damping", {{"kind", "rational"}, {"c", 1.0}, {"d", 1.0}, {"n", 2}}},
                  {"delays", {{{"kind", "constant"}, {"tau", 0.5}}}},
                  {"rhs",
                   {{"kind", "piecewise_linear"},
                    {"terms", {{{"delay", 0}, {"breakpoints", {-1.0, 0.0, 1.0}}, {"values", {1.0, 0.0, 0.0}}}}}}},
                  {"history", {{"kind", "exp_reciprocal"}, {"c", 1.0}, {"k", 1.0}, {"d", 1.0}}},
                  {"yorke", yorke(0.0, 1.0)}}});

  // lambda^2 (1 - e^{-1})^2 is 0.98 and 1.02.
  out.push_back({"boundary-alpha-below", "x' = -x - lambda x(t - 1) with alpha1 alpha2 just below 1",
                 ScenarioFamily::zero_solution,
                 {{"name", "boundary-alpha-below"},
                  {"omega", 1.0},
                  {"damping", 1.0},
                  {"delays", {{{"kind", "constant"}, {"tau", 1.0}}}},
                  {"rhs", feedback(1.566077)},
                  {"history", 1.0},
                  {"yorke", yorke(1.566077, 1.566077)}}});
  out.push_back({"boundary-alpha-above", "x' = -x - lambda x(t - 1) with alpha1 alpha2 just above 1",
                 ScenarioFamily::zero_solution,
                 {{"name", "boundary-alpha-above"},
                  {"omega", 1.0},
                  {"damping", 1.0},
                  {"delays", {{{"kind", "constant"}, {"tau", 1.0}}}},
                  {"rhs", feedback(1.597718)},
                  {"history", 1.0},
                  {"yorke", yorke(1.597718, 1.597718)}}});

  out.push_back({"wazewska-constant", "constant Wazewska model a = 1, b = 0.5, beta = 1, tau = omega",
                 ScenarioFamily::wazewska,
                 {{"name", "wazewska-constant"},
                  {"omega", 1.0},
                  {"damping", 1.0},
                  {"delays", {{{"kind", "multiple"}, {"m", 1}}}},
                  {"rhs", {{"kind", "wazewska"}, {"terms", {{{"b", 0.5}, {"beta", 1.0}, {"delay", 0}}}}}},
                  {"history", 1.0}}});

  out.push_back({"wazewska-impulsive", "periodic damping with one harvesting impulse per period",
                 ScenarioFamily::wazewska,
                 {{"name", "wazewska-impulsive"},
                  {"omega", 1.0},
                  {"damping", trig(1.0, {}, {0.3})},
                  {"delays", {{{"kind", "multiple"}, {"m", 1}}}},
                  {"rhs", {{"kind", "wazewska"}, {"terms", {{{"b", 0.4}, {"beta", 1.0}, {"delay", 0}}}}}},
                  {"impulses", {linear_impulse(0.5, -0.1)}},
                  {"history", 1.0}}});

  out.push_back({"liu-takeuchi", "two terms, delays omega and 2 omega, identity impulses", ScenarioFamily::wazewska,
                 {{"name", "liu-takeuchi"},
                  {"omega", 1.0},
                  {"damping", trig(0.6, {0.1}, {})},
                  {"delays", {{{"kind", "multiple"}, {"m", 1}}, {{"kind", "multiple"}, {"m", 2}}}},
                  {"rhs",
                   {{"kind", "wazewska"},
                    {"terms",
                     {{{"b", 0.2}, {"beta", 1.0}, {"delay", 0}},
                      {{"b", trig(0.1, {}, {0.05})}, {"beta", 0.5}, {"delay", 1}}}}}},
                  {"impulses", {linear_impulse(0.25, 0.0), linear_impulse(0.75, 0.0)}},
                  {"history", 1.0}}});

  out.push_back({"graef-compare", "single term with beta = 1 and tau = omega, no impulses", ScenarioFamily::wazewska,
                 {{"name", "graef-compare"},
                  {"omega", 1.0},
                  {"damping", trig(1.0, {0.4}, {})},
                  {"delays", {{{"kind", "multiple"}, {"m", 1}}}},
                  {"rhs",
                   {{"kind", "wazewska"}, {"terms", {{{"b", trig(0.8, {}, {0.3})}, {"beta", 1.0}, {"delay", 0}}}}}},
                  {"history", 1.0}}});
  return out;
}

}  // namespace

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> all = make();
  return all;
}

const BundledScenario& bundled(const std::string& id) {
  for (const auto& s : bundled_scenarios()) {
    if (s.id == id) return s;
  }
  throw ConfigError("scenario", "unknown bundled scenario '" + id + "'");
}

}  // namespace idde
