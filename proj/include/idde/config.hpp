#pragma once

#include <string>

#include <json.hpp>

#include "idde/model.hpp"

namespace idde {

using json = nlohmann::json;

json fn_to_json(const Fn& f);
/// A bare number is a constant.
Fn fn_from_json(const json& j, const std::string& field);

json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const json& j, const std::string& field);

json periodic_to_json(const PeriodicTrajectory& p);
PeriodicTrajectory periodic_from_json(const json& j, const std::string& field);

/// Parses and validates a scenario document. Schema violations and invariant
/// failures raise ConfigError naming the offending field.
Scenario scenario_from_json(const json& doc);
Scenario build_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Inverse of build_scenario; throws ConfigError for programmatic-only
/// pieces (custom functions or impulse maps).
json serialize(const Scenario& scenario);

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

}  // namespace idde
