#include "manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "adl/errors.hpp"
#include "adl/io.hpp"

namespace adl::cli {

const DatasetEntry& RunManifest::dataset(const std::string& id) const {
    for (const auto& d : datasets)
        if (d.id == id) return d;
    throw ConfigError("manifest has no dataset '" + id + "'");
}

RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    const auto base = std::filesystem::absolute(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q : (base / q).lexically_normal();
    };

    RunManifest m;
    try {
        std::set<std::string> ids;
        for (const auto& d : j.at("datasets")) {
            DatasetEntry e;
            e.id = d.at("id").get<std::string>();
            if (e.id.empty() || !ids.insert(e.id).second) throw ConfigError("dataset ids must be unique and non-empty");
            e.path = resolve(d.at("path").get<std::string>());
            e.schema.label_column = d.value("label_column", std::string());
            e.schema.label_index = d.value("label_index", -1);
            e.schema.has_header = d.value("has_header", true);
            e.schema.id_column = d.value("id_column", std::string());
            m.datasets.push_back(std::move(e));
        }
        if (m.datasets.empty()) throw ConfigError("manifest lists no datasets");
        m.experiment = experiment_from_json(j.value("experiment", nlohmann::json::object()));
        m.output_dir = resolve(j.value("output_dir", std::string("out")));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return m;
}

}  // namespace adl::cli
