#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace qawall::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

const std::vector<std::string>& commands();

/// Defaults for a command; unknown commands throw InvalidArgument.
nlohmann::json default_config(const std::string& command);

/// Defaults overlaid with `overrides`; every field is type- and range-checked.
/// Unknown keys raise InvalidArgument.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& overrides);

/// Runs a command with a resolved config, writing its files under
/// config["output_dir"]. Returns the manifest (also written as manifest.json).
nlohmann::json run_command(const std::string& command, const nlohmann::json& config);

/// Entry point: `qawall <command> [--config file] [flags]`.
int main(int argc, char** argv);

}  // namespace qawall::cli
