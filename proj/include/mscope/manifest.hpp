#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mscope {

struct LayerEntry {
    std::size_t index = 0;
    std::string name;
    /// Resolved against the manifest's directory when loaded.
    std::filesystem::path file;
};

/// Metadata binding per-layer cloud files to one (model, dataset, horizon, seed) run.
struct RunManifest {
    std::string model;
    std::string dataset;
    std::size_t lookback = 0;
    std::size_t horizon = 0;
    std::int64_t seed = 0;
    std::optional<std::size_t> epoch;
    std::optional<double> test_mse;
    std::vector<LayerEntry> layers;
};

/// Parses and validates a manifest. Layer files must exist; relative paths
/// are resolved against the manifest's directory.
RunManifest load_manifest(const std::filesystem::path& path);

/// Validation shared by load and save: schema values, index order, test_mse range.
void validate_manifest(const RunManifest& manifest);

/// Writes `manifest` as JSON. Layer paths are stored relative to the
/// manifest's directory when they live underneath it.
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

} // namespace mscope
