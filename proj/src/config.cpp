#include "idde/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "idde/errors.hpp"

namespace idde {

namespace {

const json& require(const json& j, const char* key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(field + "." + key, "missing required key");
  return j.at(key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

double number_at(const json& j, const char* key, const std::string& field) {
  return number(require(j, key, field), field + "." + key);
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::string kind_of(const json& j, const std::string& field) {
  const json& k = require(j, "kind", field);
  if (!k.is_string()) throw ConfigError(field + ".kind", "expected a string");
  return k.get<std::string>();
}

std::pair<double, double> number_pair(const json& j, const std::string& field) {
  const auto v = numbers(j, field);
  if (v.size() != 2) throw ConfigError(field, "expected two numbers");
  return {v[0], v[1]};
}

json delay_to_json(const DelaySpec& d) {
  switch (d.kind()) {
    case DelayKind::constant: return {{"kind", "constant"}, {"tau", d.constant_value()}};
    case DelayKind::multiple: return {{"kind", "multiple"}, {"m", d.multiple_m()}};
    case DelayKind::periodic: return {{"kind", "periodic"}, {"tau", fn_to_json(d.fn())}};
  }
  return {};
}

DelaySpec delay_from_json(const json& j, const std::optional<double>& omega, const std::string& field) {
  if (j.is_number()) return DelaySpec::constant(j.get<double>());
  const std::string kind = kind_of(j, field);
  if (kind == "constant") return DelaySpec::constant(number_at(j, "tau", field));
  if (kind == "periodic") return DelaySpec::periodic(fn_from_json(require(j, "tau", field), field + ".tau"));
  if (kind == "multiple") {
    const json& m = require(j, "m", field);
    if (!m.is_number_integer()) throw ConfigError(field + ".m", "expected a positive integer");
    if (!omega) throw ConfigError("omega", "multiple-of-omega delay needs omega");
    return DelaySpec::multiple(m.get<int>(), *omega);
  }
  throw ConfigError(field + ".kind", "unknown delay kind '" + kind + "'");
}

json impulse_to_json(const Impulse& imp) {
  json out = {{"t", imp.t}};
  const ImpulseMap& m = imp.map;
  switch (m.kind()) {
    case ImpulseKind::linear:
      out["kind"] = "linear";
      out["params"] = {{"b", m.slope()}};
      break;
    case ImpulseKind::affine:
      out["kind"] = "affine";
      out["params"] = {{"c", m.offset()}, {"b", m.slope()}};
      break;
    case ImpulseKind::tabulated:
      out["kind"] = "tabulated";
      out["params"] = {{"u", m.table_u()}, {"values", m.table_values()}};
      break;
    case ImpulseKind::custom: throw ConfigError("impulses", "custom impulse maps cannot be serialized");
  }
  if (imp.bounds.ratio) out["ratio_bounds"] = {imp.bounds.ratio->first, imp.bounds.ratio->second};
  if (imp.bounds.quotient) out["quotient_bounds"] = {imp.bounds.quotient->first, imp.bounds.quotient->second};
  return out;
}

Impulse impulse_from_json(const json& j, const std::string& field) {
  Impulse imp;
  imp.t = number_at(j, "t", field);
  const std::string kind = kind_of(j, field);
  const json& params = require(j, "params", field);
  const std::string pf = field + ".params";
  if (kind == "linear") {
    imp.map = ImpulseMap::linear(number_at(params, "b", pf));
  } else if (kind == "affine") {
    imp.map = ImpulseMap::affine(number_at(params, "c", pf), number_at(params, "b", pf));
  } else if (kind == "tabulated") {
    imp.map = ImpulseMap::tabulated(numbers(require(params, "u", pf), pf + ".u"),
                                    numbers(require(params, "values", pf), pf + ".values"));
  } else {
    throw ConfigError(field + ".kind", "unknown impulse kind '" + kind + "'");
  }
  if (j.contains("ratio_bounds")) imp.bounds.ratio = number_pair(j["ratio_bounds"], field + ".ratio_bounds");
  if (j.contains("quotient_bounds")) {
    imp.bounds.quotient = number_pair(j["quotient_bounds"], field + ".quotient_bounds");
  }
  return imp;
}

std::vector<WazewskaTermSpec> wazewska_terms_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a nonempty array of terms");
  std::vector<WazewskaTermSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    WazewskaTermSpec t;
    t.b = fn_from_json(require(j[i], "b", f), f + ".b");
    t.beta = fn_from_json(require(j[i], "beta", f), f + ".beta");
    t.delay = j[i].value("delay", std::size_t{0});
    out.push_back(std::move(t));
  }
  return out;
}

json rhs_to_json(const Rhs& rhs) {
  json out;
  auto wterms = [&] {
    json terms = json::array();
    for (const auto& t : rhs.wazewska_terms()) {
      terms.push_back({{"b", fn_to_json(t.b)}, {"beta", fn_to_json(t.beta)}, {"delay", t.delay}});
    }
    return terms;
  };
  switch (rhs.kind()) {
    case RhsKind::zero: out["kind"] = "zero"; break;
    case RhsKind::wazewska:
      out["kind"] = "wazewska";
      out["terms"] = wterms();
      break;
    case RhsKind::translated_wazewska:
      out["kind"] = "translated_wazewska";
      out["terms"] = wterms();
      out["nstar"] = periodic_to_json(*rhs.nstar());
      break;
    case RhsKind::reduced_wazewska: throw ConfigError("rhs", "reduced equations are derived, not serialized");
    case RhsKind::piecewise_linear: {
      out["kind"] = "piecewise_linear";
      json terms = json::array();
      for (const auto& t : rhs.feedback_terms()) {
        terms.push_back({{"delay", t.delay}, {"breakpoints", t.g.x}, {"values", t.g.y}});
      }
      out["terms"] = terms;
      break;
    }
  }
  return out;
}

Rhs rhs_from_json(const json& j, const std::string& field) {
  const std::string kind = kind_of(j, field);
  if (kind == "zero") return Rhs::zero();
  if (kind == "wazewska") return Rhs::wazewska(wazewska_terms_from_json(require(j, "terms", field), field + ".terms"));
  if (kind == "translated_wazewska") {
    auto nstar = std::make_shared<const PeriodicTrajectory>(periodic_from_json(require(j, "nstar", field), field + ".nstar"));
    return Rhs::translated_wazewska(wazewska_terms_from_json(require(j, "terms", field), field + ".terms"), nstar);
  }
  if (kind == "piecewise_linear") {
    const json& terms = require(j, "terms", field);
    if (!terms.is_array() || terms.empty()) throw ConfigError(field + ".terms", "expected a nonempty array");
    std::vector<FeedbackTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string f = field + ".terms[" + std::to_string(i) + "]";
      FeedbackTerm t;
      t.delay = terms[i].value("delay", std::size_t{0});
      t.g.x = numbers(require(terms[i], "breakpoints", f), f + ".breakpoints");
      t.g.y = numbers(require(terms[i], "values", f), f + ".values");
      out.push_back(std::move(t));
    }
    return Rhs::piecewise_linear(std::move(out));
  }
  throw ConfigError(field + ".kind", "unknown rhs kind '" + kind + "'");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json fn_to_json(const Fn& f) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Fn::Constant>) {
          return {{"kind", "constant"}, {"value", r.value}};
        } else if constexpr (std::is_same_v<T, Fn::Trig>) {
          return {{"kind", "trig"}, {"period", r.period}, {"mean", r.mean}, {"cos", r.cos}, {"sin", r.sin}};
        } else if constexpr (std::is_same_v<T, Fn::Tabulated>) {
          return {{"kind", "tabulated"}, {"period", r.period}, {"values", r.values}};
        } else if constexpr (std::is_same_v<T, Fn::Rational>) {
          return {{"kind", "rational"}, {"c", r.c}, {"d", r.d}, {"n", r.n}};
        } else if constexpr (std::is_same_v<T, Fn::Exponential>) {
          return {{"kind", "exponential"}, {"c", r.c}, {"k", r.k}};
        } else if constexpr (std::is_same_v<T, Fn::ExpReciprocal>) {
          return {{"kind", "exp_reciprocal"}, {"c", r.c}, {"k", r.k}, {"d", r.d}};
        } else {
          throw ConfigError("function", "custom functions cannot be serialized");
        }
      },
      f.repr());
}

Fn fn_from_json(const json& j, const std::string& field) {
  if (j.is_number()) return Fn::constant(j.get<double>());
  const std::string kind = kind_of(j, field);
  if (kind == "constant") return Fn::constant(number_at(j, "value", field));
  if (kind == "trig") {
    return Fn::trig(number_at(j, "period", field), number_at(j, "mean", field),
                    j.contains("cos") ? numbers(j["cos"], field + ".cos") : std::vector<double>{},
                    j.contains("sin") ? numbers(j["sin"], field + ".sin") : std::vector<double>{});
  }
  if (kind == "tabulated") {
    return Fn::tabulated(number_at(j, "period", field), numbers(require(j, "values", field), field + ".values"));
  }
  if (kind == "rational") {
    const json& n = require(j, "n", field);
    if (!n.is_number_integer()) throw ConfigError(field + ".n", "expected an integer exponent");
    return Fn::rational(number_at(j, "c", field), number_at(j, "d", field), n.get<int>());
  }
  if (kind == "exponential") return Fn::exponential(number_at(j, "c", field), number_at(j, "k", field));
  if (kind == "exp_reciprocal") {
    return Fn::exp_reciprocal(number_at(j, "c", field), number_at(j, "k", field), number_at(j, "d", field));
  }
  throw ConfigError(field + ".kind", "unknown function kind '" + kind + "'");
}

json trajectory_to_json(const Trajectory& traj) {
  json segs = json::array();
  for (const Segment& s : traj.segments()) segs.push_back({s.t0, s.t1, s.x0, s.x1, s.d0, s.d1});
  json jumps = json::array();
  for (const Jump& jp : traj.jumps()) jumps.push_back({jp.t, jp.left, jp.right});
  return {{"t_start", traj.t_start()}, {"x_start", traj.x_start_value()}, {"segments", segs}, {"jumps", jumps}};
}

Trajectory trajectory_from_json(const json& j, const std::string& field) {
  Trajectory out(number_at(j, "t_start", field), number_at(j, "x_start", field));
  const json& segs = require(j, "segments", field);
  const json& jumps = j.contains("jumps") ? j["jumps"] : json::array();
  std::size_t next_jump = 0;
  auto flush_jumps = [&](double t) {
    while (next_jump < jumps.size()) {
      const auto jp = numbers(jumps[next_jump], field + ".jumps");
      if (jp.size() != 3) throw ConfigError(field + ".jumps", "expected [t, left, right]");
      if (jp[0] != t) break;
      out.add_jump(jp[2]);
      ++next_jump;
    }
  };
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto v = numbers(segs[i], field + ".segments[" + std::to_string(i) + "]");
    if (v.size() != 6) throw ConfigError(field + ".segments", "expected [t0, t1, x0, x1, d0, d1]");
    flush_jumps(out.t_end());
    try {
      out.append({v[0], v[1], v[2], v[3], v[4], v[5]});
    } catch (const Error& e) {
      throw ConfigError(field + ".segments[" + std::to_string(i) + "]", e.what());
    }
  }
  flush_jumps(out.t_end());
  if (next_jump != jumps.size()) throw ConfigError(field + ".jumps", "jump instants do not match segment ends");
  return out;
}

json periodic_to_json(const PeriodicTrajectory& p) {
  return {{"omega", p.omega()}, {"period", trajectory_to_json(p.period())}};
}

PeriodicTrajectory periodic_from_json(const json& j, const std::string& field) {
  return PeriodicTrajectory(trajectory_from_json(require(j, "period", field), field + ".period"),
                            number_at(j, "omega", field));
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("$", "scenario must be a JSON object");
  static const char* known[] = {"omega", "t0", "damping", "delays", "rhs", "impulses", "history",
                                "yorke", "assume_h3ii", "grid_density", "name", "description"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError(key, "unknown top-level key");
    }
  }
  Scenario s;
  s.grid_density = doc.contains("grid_density") ? static_cast<int>(number(doc["grid_density"], "grid_density"))
                                                : default_grid_density();
  if (doc.contains("omega") && !doc["omega"].is_null()) s.omega = number(doc["omega"], "omega");
  s.t0 = doc.contains("t0") ? number(doc["t0"], "t0") : 0.0;
  s.damping = fn_from_json(require(doc, "damping", "$"), "damping");

  if (doc.contains("delays")) {
    const json& d = doc["delays"];
    if (!d.is_array()) throw ConfigError("delays", "expected an array");
    for (std::size_t i = 0; i < d.size(); ++i) {
      s.delays.push_back(delay_from_json(d[i], s.omega, "delays[" + std::to_string(i) + "]"));
    }
  }
  s.rhs = doc.contains("rhs") ? rhs_from_json(doc["rhs"], "rhs") : Rhs::zero();

  if (doc.contains("impulses")) {
    const json& imps = doc["impulses"];
    if (!imps.is_array()) throw ConfigError("impulses", "expected an array");
    std::vector<Impulse> base;
    for (std::size_t i = 0; i < imps.size(); ++i) base.push_back(impulse_from_json(imps[i], "impulses[" + std::to_string(i) + "]"));
    if (!base.empty()) {
      if (!s.omega) throw ConfigError("omega", "impulses need omega");
      s.impulses = ImpulseSchedule(std::move(base), *s.omega);
    }
  }

  if (doc.contains("history")) {
    const json& h = doc["history"];
    if (h.is_object() && h.value("kind", std::string{}) == "trajectory") {
      s.history = trajectory_from_json(h, "history");
    } else {
      s.history = fn_from_json(h, "history");
    }
  }

  if (doc.contains("yorke")) {
    const json& y = doc["yorke"];
    if (!y.is_array()) throw ConfigError("yorke", "expected an array of terms");
    for (std::size_t i = 0; i < y.size(); ++i) {
      const std::string f = "yorke[" + std::to_string(i) + "]";
      YorkeTerm t;
      t.delay = y[i].value("delay", std::size_t{0});
      t.lambda1 = fn_from_json(require(y[i], "lambda1", f), f + ".lambda1");
      t.lambda2 = fn_from_json(require(y[i], "lambda2", f), f + ".lambda2");
      s.yorke.terms.push_back(std::move(t));
    }
  }
  if (doc.contains("assume_h3ii")) {
    if (!doc["assume_h3ii"].is_boolean()) throw ConfigError("assume_h3ii", "expected a boolean");
    s.assume_h3ii = doc["assume_h3ii"].get<bool>();
  }
  validate(s);
  return s;
}

Scenario build_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return build_scenario(buf.str());
}

json serialize(const Scenario& s) {
  json out;
  if (s.omega) out["omega"] = *s.omega;
  out["t0"] = s.t0;
  out["damping"] = fn_to_json(s.damping);
  out["delays"] = json::array();
  for (const DelaySpec& d : s.delays) out["delays"].push_back(delay_to_json(d));
  out["rhs"] = rhs_to_json(s.rhs);
  out["impulses"] = json::array();
  for (const Impulse& imp : s.impulses.base()) out["impulses"].push_back(impulse_to_json(imp));
  if (const auto* f = std::get_if<Fn>(&s.history)) {
    out["history"] = fn_to_json(*f);
  } else {
    json h = trajectory_to_json(std::get<Trajectory>(s.history));
    h["kind"] = "trajectory";
    out["history"] = h;
  }
  if (!s.yorke.empty()) {
    out["yorke"] = json::array();
    for (const YorkeTerm& t : s.yorke.terms) {
      out["yorke"].push_back({{"delay", t.delay}, {"lambda1", fn_to_json(t.lambda1)}, {"lambda2", fn_to_json(t.lambda2)}});
    }
  }
  out["assume_h3ii"] = s.assume_h3ii;
  out["grid_density"] = s.grid_density;
  return out;
}

}  // namespace idde
