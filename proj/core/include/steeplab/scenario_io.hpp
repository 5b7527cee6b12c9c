#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "steeplab/model.hpp"

namespace steeplab {

/// Serializes a scenario as a JSON config file (sorted keys, shortest
/// round-trip number formatting). Custom firing families cannot be written.
std::string scenario_to_json(const Scenario& scenario);

/// Parses and validates a scenario config. Throws ConfigError.
Scenario scenario_from_json(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace steeplab
