#pragma once

#include <string>
#include <vector>

#include "slice/harness.hpp"

namespace slice {

/// JSON form of the config, as read by parse_config.
std::string config_to_json(const ExperimentConfig& cfg);

/// Strict JSON config: unknown keys are rejected, overrides "a.b=v" are
/// applied after file values. Throws Error(Config).
ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Writes provenance.json (resolved config, version, seed) into dir.
void write_provenance(const std::string& dir, const ExperimentConfig& cfg, const std::string& command);

inline constexpr const char* kVersion = "slicelab 0.1.0";

}  // namespace slice
