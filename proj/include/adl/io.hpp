#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adl/data.hpp"
#include "adl/dictionaries.hpp"
#include "adl/eval.hpp"
#include "adl/src.hpp"

namespace adl {

inline constexpr int kDictionaryFormatVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

/// Everything needed to reuse a dictionary on raw (unstandardized) data.
struct DictionaryFile {
    Dictionary dictionary;
    /// Training-split standardization; applied to data before classification.
    std::optional<Scaler> scaler;
    /// Optional projection applied after the scaler; `dictionary.dim()` is its output size.
    std::optional<PcaModel> pca;
    /// Names of the raw input columns, in order.
    std::vector<std::string> feature_names;
    std::string label_column;
    /// Free-form build record: config, dataset id, fold, ledger summary.
    nlohmann::json build = nlohmann::json::object();
};

nlohmann::json to_json(const DictionaryFile& file);
DictionaryFile dictionary_file_from_json(const nlohmann::json& j);

void save_dictionary(const DictionaryFile& file, const std::filesystem::path& path);
/// Throws IoError or SchemaError.
DictionaryFile load_dictionary(const std::filesystem::path& path);

nlohmann::json to_json(const LassoConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults. Throws ConfigError on bad values.
ExperimentConfig experiment_from_json(const nlohmann::json& j);
LassoConfig lasso_from_json(const nlohmann::json& j, LassoConfig base = {});

/// One row per cell, sorted by (dataset, method, rate, fold). Deterministic:
/// no timings are written.
void write_report_csv(const EvaluationReport& report, std::ostream& out);
std::string report_csv(const EvaluationReport& report);

/// Wall time per cell; the only non-deterministic report output.
void write_timings_csv(const EvaluationReport& report, std::ostream& out);

/// Aggregates, per-dataset means, ranks and metadata.
nlohmann::json report_summary(const EvaluationReport& report);

/// Rows = methods, columns = size rates, entries = mean accuracy in percent.
std::string mean_accuracy_table_csv(const EvaluationReport& report);
std::string mean_accuracy_table_markdown(const EvaluationReport& report);

}  // namespace adl
