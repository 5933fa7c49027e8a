// Scenario file ingestion. Scenarios are JSON documents with a strict
// schema: unknown keys are rejected and every matrix is a row-major nested
// array. See README.md for the full format.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "dcoord/sim.hpp"

namespace dcoord {

struct ScenarioFormatError : std::runtime_error {
  explicit ScenarioFormatError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Parses a scenario from JSON text. The name is used in error messages.
Scenario parse_scenario(const std::string& text, const std::string& name);

/// Loads a scenario file; parse errors carry file:line:column context.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace dcoord
