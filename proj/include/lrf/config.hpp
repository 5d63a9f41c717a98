#pragma once

#include "lrf/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lrf {

inline constexpr const char* kVersion = "0.1.0";

/// Names of the shipped experiment presets.
std::vector<std::string> preset_names();

/// Canonical JSON text of a preset (also a complete example config).
std::string preset_json(const std::string& name);

/// Fully resolved preset.
ExperimentConfig preset_config(const std::string& name);

/// Parses a config from JSON text. A "preset" key loads that preset first
/// and overlays the remaining keys on top (RFC 7386 merge semantics).
/// Unknown keys and malformed values raise ValidationError with a
/// line-numbered (parse) or path-named (semantic) diagnostic.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& source_name);

/// Loads and validates a config file. Missing file raises ValidationError
/// naming the path.
ExperimentConfig load_experiment_config(const std::string& path);

/// Canonical JSON rendering of a config (defaults filled in); hashing this
/// fingerprints the run.
std::string canonical_config_json(const ExperimentConfig& cfg);

/// FNV-1a 64-bit hex digest.
std::string fnv1a_hex(const std::string& text);

/// Deterministic reproduction record written next to every run's outputs.
std::string run_manifest_json(const ExperimentConfig& cfg);

}  // namespace lrf
