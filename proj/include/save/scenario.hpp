#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "save/env.hpp"

namespace save {

/// Serialized scenario document (pretty-printed JSON).
std::string scenario_to_json(const ScenarioConfig& config);
/// Parses and validates; throws ConfigError.
ScenarioConfig scenario_from_json(std::string_view text);

/// Built-in scenarios:
///   synthetic_nojam        K=5, J=1, T=400, rho=0.8, every server reachable
///   synthetic_stochastic   same, servers on with (0.7, 0.8, 0.9, 1, 0.6)
///   synthetic_adversarial  that table for slots 1-200, then (0.3, 1, 0.6, 0.5, 0.8)
///   sideobs_table1         no jamming; server reveal probabilities
///                          (1, 1, 0, 0, 1) then (0.3, 1, 0.6, 0.5, 0) from slot 201
///   links_table4           K=3, J=3, device-to-device sharing links
const std::vector<std::string>& preset_ids();
ScenarioConfig preset_scenario(std::string_view id);

/// A preset id, or a path to a scenario JSON file.
ScenarioConfig load_scenario(const std::string& id_or_path);

}  // namespace save
