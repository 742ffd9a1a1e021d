#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "janus/scenario.hpp"
#include "janus/sim_engine.hpp"

namespace janus {

/// Bundled scenario presets (data files under presets/).
enum class PresetId { JanusBaseline, UsdcLike, DaiLike, UstLike, FlatcoinLike };

std::string to_string(PresetId id);
std::optional<PresetId> parse_preset_id(std::string_view name);
const std::vector<PresetId>& all_presets();

/// Directory holding preset files; JANUS_PRESET_DIR overrides the built-in path.
std::filesystem::path preset_directory();

/// Parse and validate a scenario. Unknown keys are errors. Throws
/// ValidationError naming the offending field.
ScenarioConfig parse_config(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);

struct LoadedConfig {
    ScenarioConfig config;
    nlohmann::json source;
    std::string label;
};

LoadedConfig load_config_file(const std::filesystem::path& path);
/// Accepts the five bundled presets plus any other file name in the preset
/// directory (for example "quiescent").
LoadedConfig load_preset(const std::string& name);
ScenarioConfig preset_config(PresetId id);

/// FNV-1a 64 of the canonical (sorted-key) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& source);

FrontierGrid parse_grid(const nlohmann::json& j, std::vector<std::string>* presets = nullptr);

}  // namespace janus
