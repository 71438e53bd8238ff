#include "idde/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "idde/errors.hpp"

namespace idde {

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  traj.write_csv(out);
  return out.str();
}

std::string attractivity_csv(const AttractivityReport& report) {
  std::string out = "scale,period,e_m\n";
  char buf[96];
  for (const auto& run : report.runs) {
    for (std::size_t m = 0; m < run.errors.size(); ++m) {
      std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g\n", run.scale, m, run.errors[m]);
      out += buf;
    }
  }
  return out;
}

std::string plotdata(const Trajectory& traj) {
  std::string out = "# t value\n";
  char buf[80];
  auto row = [&](double t, double v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", t, v);
    out += buf;
  };
  const auto segs = traj.segments();
  if (segs.empty()) return out;
  row(segs.front().t0, segs.front().x0);
  for (const Segment& s : segs) {
    row(s.t1, s.x1);
    if (traj.has_jump_at(s.t1) && s.t1 < traj.t_end()) row(s.t1, traj.eval_right_limit(s.t1));
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(path, "cannot open for writing");
  out << content;
  if (!out) throw ConfigError(path, "write failed");
}

json to_json(const RunManifest& m) {
  return {{"subcommand", m.subcommand},
          {"tool_version", kToolVersion},
          {"config", m.config},
          {"settings", m.settings},
          {"outputs", m.outputs}};
}

RunManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("manifest", "expected an object");
  RunManifest m;
  if (!j.contains("subcommand") || !j["subcommand"].is_string()) throw ConfigError("manifest.subcommand", "missing");
  m.subcommand = j["subcommand"].get<std::string>();
  m.config = j.value("config", json());
  m.settings = j.value("settings", json::object());
  if (j.contains("outputs")) m.outputs = j["outputs"].get<std::vector<std::string>>();
  return m;
}

}  // namespace idde
