#pragma once

// YAML scenario files.
//
// A document is either a single scenario (a map with a `scenario` section) or
// `scenarios:` followed by a list of them. Sections: scenario, pursuers,
// evader, reference, controller, objective, learning. See README.md for the
// full schema and defaults.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nrpursuit/sim.hpp"

namespace nrpursuit {

struct ParsedScenario {
  std::string name;                      // may be empty when the name itself is invalid
  std::optional<ScenarioConfig> config;  // empty when validation failed
  std::optional<ConfigError> error;
  std::vector<std::string> defaulted;    // optional fields filled from defaults
};

/// Parses every scenario independently; a broken scenario does not prevent
/// the others from loading. Throws ConfigError only for document-level
/// problems (unreadable file, YAML syntax, bad top-level layout).
std::vector<ParsedScenario> parse_config_text(std::string_view text);
std::vector<ParsedScenario> load_config_file(const std::filesystem::path& path);

/// Strict variants: throw the first scenario error.
std::vector<ScenarioConfig> parse_config(std::string_view text);
std::vector<ScenarioConfig> load_config(const std::filesystem::path& path);

}  // namespace nrpursuit
