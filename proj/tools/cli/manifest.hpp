#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adl/data.hpp"
#include "adl/eval.hpp"

namespace adl::cli {

struct DatasetEntry {
    std::string id;
    /// Resolved against the manifest's directory.
    std::filesystem::path path;
    CsvSchema schema;
};

struct RunManifest {
    std::vector<DatasetEntry> datasets;
    ExperimentConfig experiment;
    std::filesystem::path output_dir;

    [[nodiscard]] const DatasetEntry& dataset(const std::string& id) const;
};

/// Reads a JSON manifest. Relative paths are resolved against the manifest's
/// directory. Throws IoError or ConfigError.
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace adl::cli
