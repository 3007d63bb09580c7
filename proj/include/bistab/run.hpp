// run.hpp - executes a RunConfig: writes the command's CSV (and SVG when
// plotting) into the output directory, followed by manifest.json.

#pragma once

#include "bistab/config.hpp"

#include "json.hpp"

#include <ostream>
#include <string>

namespace bistab {

inline constexpr const char* kVersion = "1.0.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int partial = 1;  // some node failed, the run completed
inline constexpr int config = 2;
}

/// Config section of the manifest, with typed JSON values.
nlohmann::json config_to_json(const RunConfig& cfg);

/// Inverse of config_to_json. Throws ConfigError on unknown keys.
RunConfig config_from_json(const nlohmann::json& j);

/// Runs cfg.command. Progress and warnings go to `log`. Returns an exit code.
int run(const RunConfig& cfg, std::ostream& log);

} // namespace bistab
