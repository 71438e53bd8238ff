#pragma once

#include <string>
#include <vector>

#include "idde/config.hpp"
#include "idde/trajectory.hpp"
#include "idde/wazewska.hpp"

namespace idde {

inline constexpr const char* kToolVersion = "0.1.0";

/// Pretty JSON with a trailing newline; key order is sorted, so output is
/// stable across runs.
std::string dump_json(const json& j);

std::string trajectory_csv(const Trajectory& traj);

/// `scale,period,e_m` rows, one per scale and period.
std::string attractivity_csv(const AttractivityReport& report);

/// Two whitespace-separated columns `t value` for gnuplot; jumps emit both sides.
std::string plotdata(const Trajectory& traj);

/// Writes `content` to `path`, creating parent directories. I/O failures
/// raise ConfigError naming the path.
void write_file(const std::string& path, const std::string& content);

/// What produced a set of outputs; enough to run it again.
struct RunManifest {
  std::string subcommand;
  json config;
  json settings;
  std::vector<std::string> outputs;
};

json to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

}  // namespace idde
