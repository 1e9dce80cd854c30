#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Labeled sample set. Samples are the columns of `features` (m x N).
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int class_count = 0;
    /// Original label text per class id, in first-appearance order.
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::vector<std::string> sample_ids;

    [[nodiscard]] int dim() const { return static_cast<int>(features.rows()); }
    [[nodiscard]] int size() const { return static_cast<int>(features.cols()); }

    /// Columns `indices` of this dataset, keeping class ids and names.
    [[nodiscard]] Dataset subset(const std::vector<int>& indices) const;

    /// Throws SchemaError/DimensionError/NumericError if the invariants fail.
    /// `require_all_classes` demands every class id in [0, c) occurs.
    void validate(bool require_all_classes = true) const;
};

/// Raw CSV records; blank lines are skipped and cells are trimmed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Throws IoError. Without a header, columns are named f0, f1, ...
CsvTable read_csv_table(const std::filesystem::path& path, bool has_header = true);

/// Parses a finite decimal number; false on blank or malformed text.
bool parse_number(const std::string& cell, double& out);

/// Which CSV columns hold what.
struct CsvSchema {
    /// Label column by header name; if empty, `label_index` is used.
    std::string label_column;
    /// Label column index; negative counts from the end (-1 = last).
    int label_index = -1;
    bool has_header = true;
    /// Optional sample-id column (by header name).
    std::string id_column;
};

/// Reads a comma-separated file. Labels are re-encoded densely to 0..c-1 in
/// order of first appearance. Throws IoError or SchemaError.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes features and labels (as class names) with a header row. The label
/// column is named `label_column`. Round-trips through load_csv exactly.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               const std::string& label_column = "label");

/// Per-feature z-score parameters fitted on a training split.
struct Scaler {
    Vector mean;
    /// Population standard deviation; 0 marks a constant feature.
    Vector scale;

    [[nodiscard]] Matrix transform(const Matrix& x) const;
    [[nodiscard]] Dataset transform(const Dataset& ds) const;
};

Scaler fit_scaler(const Dataset& ds);

/// Z-scores every feature row over the samples of `ds`; constant rows map to 0.
std::pair<Dataset, Scaler> standardize(const Dataset& ds);

/// Stratified assignment of samples to folds.
struct FoldPlan {
    int fold_count = 5;
    std::vector<int> assignments;
    std::uint64_t seed = 0;

    [[nodiscard]] std::vector<int> test_indices(int fold) const;
    [[nodiscard]] std::vector<int> train_indices(int fold) const;
};

/// Each class is shuffled (seeded) and the classes are dealt round-robin
/// over the folds in one continuous pass, so per-class and overall fold
/// sizes differ by at most one. Throws ConfigError if fold_count < 2 or
/// fold_count > N.
FoldPlan make_folds(const Dataset& ds, int fold_count, std::uint64_t seed);

/// Principal-component projection fitted on a training set.
struct PcaModel {
    Vector mean;
    /// m x d, orthonormal columns ordered by decreasing variance.
    Matrix basis;
    /// Variance captured by each basis column.
    Vector variances;

    [[nodiscard]] int dim() const { return static_cast<int>(basis.cols()); }
    [[nodiscard]] Vector project(const Vector& x) const;
    [[nodiscard]] Matrix project(const Matrix& x) const;
    [[nodiscard]] Dataset project(const Dataset& ds) const;
    [[nodiscard]] Vector reconstruct(const Vector& z) const;
};

/// Top-d principal directions of the mean-centred training data. Each basis
/// column is signed so that its largest-magnitude entry is positive.
/// Throws ConfigError unless 1 <= d <= min(m, N).
PcaModel pca_fit(const Dataset& train, int d);

inline Vector pca_project(const PcaModel& model, const Vector& x) { return model.project(x); }

}  // namespace adl
