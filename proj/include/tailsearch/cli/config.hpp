#pragma once

#include <filesystem>
#include <string>

#include "tailsearch/experiment.hpp"

namespace tailsearch::cli {

// Environment variable that overrides the config's output_dir.
inline constexpr const char* kOutputDirEnv = "TAILSEARCH_OUTPUT_DIR";

/// Parses one JSON object. Relative paths are resolved against `base_dir`.
/// Unknown keys and type mismatches raise ConfigError naming the field.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});

/// Reads and parses a config file; a missing file raises ConfigError whose
/// message names the path.
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace tailsearch::cli
