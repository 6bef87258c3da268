#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bugrepro/generation.hpp"
#include "bugrepro/harness.hpp"

namespace bugrepro {

// Fully resolved run configuration; snapshotted into the run manifest before
// any stage executes.
struct Config {
    std::filesystem::path corpus_path;
    std::optional<std::filesystem::path> project_meta_path;
    std::filesystem::path run_dir;
    std::filesystem::path workspaces_dir; // default: <run_dir>/.work
    int workers = 1;
    std::string instruction = kDefaultInstruction;
    ProviderConfig provider;
    AdapterSpec adapter;

    // Snapshot used for resume comparison and auditing. Excludes secrets.
    nlohmann::ordered_json snapshot() const;
};

// Key/value view of an INI-style file: "[section]" headers, "key = value"
// entries, '#'/';' comments. Values may be double-quoted to preserve
// significant whitespace. Keys are reported as "section.key".
std::map<std::string, std::string> parse_ini(const std::string& text);

// Loads and resolves a config file. Relative paths are resolved against the
// config file's directory. Flag overrides (already validated by the CLI) are
// applied afterwards by the caller mutating the returned Config.
Config load_config(const std::filesystem::path& path);

// Rebuilds a Config from a manifest snapshot (for stage commands running
// against an existing run directory).
Config config_from_snapshot(const nlohmann::json& snapshot);

} // namespace bugrepro
