#pragma once

// Structured-text (JSON) run configuration with sections `basin`, `env` and
// `emodps`. Absent sections and keys keep the built-in defaults; each basin
// array that is present replaces the default array wholesale. Unknown keys are
// rejected.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "nile/env.hpp"
#include "nile/nsga2.hpp"

namespace nile {

struct RunConfig {
    EnvConfig env;
    MoeaConfig emodps;
};

/// Relative trace_file paths resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Full document, with inline traces; loading it back yields the same config.
nlohmann::json config_to_json(const RunConfig& config);

/// `explicit_path` if given, else $NILE_MOMDP_CONFIG if set, else none
/// (built-in defaults).
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& explicit_path);

}  // namespace nile
