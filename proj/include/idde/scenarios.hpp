#pragma once

#include <string>
#include <vector>

#include "idde/config.hpp"

namespace idde {

/// Reference solution the criteria of a scenario speak about.
enum class ScenarioFamily { zero_solution, wazewska };

struct BundledScenario {
  std::string id;
  std::string description;
  ScenarioFamily family = ScenarioFamily::zero_solution;
  json doc;

  Scenario build() const { return scenario_from_json(doc); }
};

/// Scenarios shipped with the tool, in a fixed order.
const std::vector<BundledScenario>& bundled_scenarios();

/// Throws ConfigError for an unknown id.
const BundledScenario& bundled(const std::string& id);

}  // namespace idde
