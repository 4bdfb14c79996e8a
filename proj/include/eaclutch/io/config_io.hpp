#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "eaclutch/dynamics/config.hpp"

namespace eaclutch::io {

/// Everything a command needs besides its own flags.
struct RunConfig {
    ClutchConfig clutch;
    LoadCellModel loadcell;
    double force_ratio = 0.8;  // release runs start at this fraction of capacity
};

nlohmann::json to_json(const RunConfig& rc);

/// Every field must be present and no unknown keys are allowed. Throws
/// ConfigError naming the dot path of the first problem, then runs the
/// model validators.
RunConfig run_config_from_json(const nlohmann::json& j);

/// "a.b.c=value". value is read as JSON when it parses, as a string
/// otherwise. The path must already exist in j.
void apply_override(nlohmann::json& j, const std::string& assignment);

struct LoadedConfig {
    RunConfig config;
    nlohmann::json document;  // after overrides
    std::string hash;         // of the canonical document
};

LoadedConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// 64-bit FNV-1a of the compact, key-sorted dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

}  // namespace eaclutch::io
