#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idde/output.hpp"

namespace idde {

/// Case ids accepted by reproduce().
const std::vector<std::string>& reproduce_cases();

struct ReproduceResult {
  bool passed = false;
  std::string summary;
  RunManifest manifest;
};

/// Runs one bundled case end to end and writes trajectory.csv, report.json,
/// attractivity.csv, summary.txt and manifest.json into `out_dir`.
/// `grid_density` overrides the sampling density of the scenarios.
ReproduceResult reproduce(const std::string& case_id, const std::string& out_dir,
                          std::optional<int> grid_density = std::nullopt);

}  // namespace idde
