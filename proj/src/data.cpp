#include "adl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "adl/errors.hpp"
#include "adl/format.hpp"
#include "adl/random.hpp"

namespace adl {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
            was_quoted = true;
        } else if (ch == ',') {
            cells.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(was_quoted ? cur : trim(cur));
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = first + cell.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

Dataset Dataset::subset(const std::vector<int>& indices) const {
    Dataset out;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(indices.size()));
    out.labels.reserve(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const int i = indices[j];
        if (i < 0 || i >= size()) throw DimensionError("Dataset::subset: index out of range");
        out.features.col(static_cast<Eigen::Index>(j)) = features.col(i);
        out.labels.push_back(labels[static_cast<std::size_t>(i)]);
        if (!sample_ids.empty()) out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(i)]);
    }
    out.class_count = class_count;
    out.class_names = class_names;
    out.feature_names = feature_names;
    return out;
}

void Dataset::validate(bool require_all_classes) const {
    if (static_cast<std::size_t>(features.cols()) != labels.size())
        throw DimensionError("Dataset: feature column count differs from label count");
    if (!sample_ids.empty() && sample_ids.size() != labels.size())
        throw DimensionError("Dataset: sample id count differs from label count");
    if (!features.allFinite()) throw NumericError("Dataset: non-finite feature value");
    std::vector<int> seen(static_cast<std::size_t>(std::max(class_count, 0)), 0);
    for (int l : labels) {
        if (l < 0 || l >= class_count) throw SchemaError("Dataset: label outside [0, class_count)");
        seen[static_cast<std::size_t>(l)] = 1;
    }
    if (require_all_classes && std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw SchemaError("Dataset: a class id has no samples");
}

CsvTable read_csv_table(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto record = split_record(line);
        if (first && has_header) table.header = std::move(record);
        else table.rows.push_back(std::move(record));
        first = false;
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    if (!has_header && !table.rows.empty())
        for (std::size_t j = 0; j < table.rows.front().size(); ++j) table.header.push_back("f" + std::to_string(j));
    return table;
}

bool parse_number(const std::string& cell, double& out) { return parse_double(cell, out); }

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    CsvTable table = read_csv_table(path, schema.has_header);
    if (table.header.empty()) throw SchemaError(path.string() + ": empty file");
    if (table.rows.empty()) throw SchemaError(path.string() + ": no data rows");
    const auto& header = table.header;
    const std::size_t width = header.size();
    const std::size_t first_row = schema.has_header ? 1 : 0;

    auto find_column = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw SchemaError(path.string() + ": no column named '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    std::size_t label_col;
    if (!schema.label_column.empty()) {
        if (!schema.has_header) throw SchemaError("label column by name requires a header row");
        label_col = find_column(schema.label_column);
    } else {
        const long idx = schema.label_index < 0 ? static_cast<long>(width) + schema.label_index
                                                : schema.label_index;
        if (idx < 0 || idx >= static_cast<long>(width))
            throw SchemaError(path.string() + ": label column index out of range");
        label_col = static_cast<std::size_t>(idx);
    }
    std::optional<std::size_t> id_col;
    if (!schema.id_column.empty()) {
        id_col = find_column(schema.id_column);
        if (*id_col == label_col) throw SchemaError("id column and label column coincide");
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < width; ++j)
        if (j != label_col && (!id_col || j != *id_col)) feature_cols.push_back(j);
    if (feature_cols.empty()) throw SchemaError(path.string() + ": no feature columns");

    const std::size_t n = table.rows.size();
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(feature_cols.size()), static_cast<Eigen::Index>(n));
    for (std::size_t j : feature_cols) ds.feature_names.push_back(header[j]);

    std::map<std::string, int> codes;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& rec = table.rows[r];
        const std::size_t line_no = first_row + r + 1;
        if (rec.size() != width)
            throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(width) + " cells, got " + std::to_string(rec.size()));
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            double v;
            const auto& cell = rec[feature_cols[f]];
            if (!parse_double(cell, v))
                throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                                  cell + "' in column '" + header[feature_cols[f]] + "'");
            ds.features(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(r)) = v;
        }
        const auto& label = rec[label_col];
        if (label.empty()) throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": blank label");
        auto [it, inserted] = codes.try_emplace(label, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(label);
        ds.labels.push_back(it->second);
        if (id_col) ds.sample_ids.push_back(rec[*id_col]);
    }
    ds.class_count = static_cast<int>(ds.class_names.size());
    if (ds.class_count < 2) throw SchemaError(path.string() + ": fewer than 2 classes");
    ds.validate();
    return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const bool with_ids = !ds.sample_ids.empty();
    if (with_ids) out << "id,";
    for (int f = 0; f < ds.dim(); ++f) {
        const std::string name = static_cast<std::size_t>(f) < ds.feature_names.size()
                                     ? ds.feature_names[static_cast<std::size_t>(f)]
                                     : "f" + std::to_string(f);
        out << csv_escape(name) << ',';
    }
    out << csv_escape(label_column) << '\n';
    for (int i = 0; i < ds.size(); ++i) {
        if (with_ids) out << csv_escape(ds.sample_ids[static_cast<std::size_t>(i)]) << ',';
        for (int f = 0; f < ds.dim(); ++f) out << format_double(ds.features(f, i)) << ',';
        const int l = ds.labels[static_cast<std::size_t>(i)];
        out << csv_escape(static_cast<std::size_t>(l) < ds.class_names.size()
                              ? ds.class_names[static_cast<std::size_t>(l)]
                              : std::to_string(l))
            << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

Matrix Scaler::transform(const Matrix& x) const {
    if (x.rows() != mean.size()) throw DimensionError("Scaler: feature dimension mismatch");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index f = 0; f < x.rows(); ++f) {
        if (scale(f) == 0.0)
            out.row(f).setZero();
        else
            out.row(f) = (x.row(f).array() - mean(f)) / scale(f);
    }
    return out;
}

Dataset Scaler::transform(const Dataset& ds) const {
    Dataset out = ds;
    out.features = transform(ds.features);
    return out;
}

Scaler fit_scaler(const Dataset& ds) {
    if (ds.size() < 2) throw ConfigError("standardize: need at least 2 samples");
    Scaler s;
    const double n = static_cast<double>(ds.size());
    s.mean = ds.features.rowwise().sum() / n;
    s.scale.resize(ds.dim());
    for (Eigen::Index f = 0; f < ds.features.rows(); ++f) {
        const double var = (ds.features.row(f).array() - s.mean(f)).square().sum() / n;
        const double sd = std::sqrt(var);
        s.scale(f) = sd <= 1e-12 * std::max(1.0, std::abs(s.mean(f))) ? 0.0 : sd;
    }
    return s;
}

std::pair<Dataset, Scaler> standardize(const Dataset& ds) {
    Scaler s = fit_scaler(ds);
    Dataset out = s.transform(ds);
    return {std::move(out), std::move(s)};
}

std::vector<int> FoldPlan::test_indices(int fold) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> FoldPlan::train_indices(int fold) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(static_cast<int>(i));
    return out;
}

FoldPlan make_folds(const Dataset& ds, int fold_count, std::uint64_t seed) {
    if (fold_count < 2) throw ConfigError("make_folds: fold_count must be >= 2");
    if (fold_count > ds.size()) throw ConfigError("make_folds: fold_count exceeds sample count");

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(ds.class_count));
    for (int i = 0; i < ds.size(); ++i) by_class[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])].push_back(i);

    Rng rng(seed);
    FoldPlan plan;
    plan.fold_count = fold_count;
    plan.seed = seed;
    plan.assignments.assign(static_cast<std::size_t>(ds.size()), -1);
    std::size_t position = 0;
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (int i : members) plan.assignments[static_cast<std::size_t>(i)] = static_cast<int>(position++ % static_cast<std::size_t>(fold_count));
    }
    return plan;
}

Vector PcaModel::project(const Vector& x) const {
    if (x.size() != mean.size()) throw DimensionError("pca_project: dimension mismatch");
    return basis.transpose() * (x - mean);
}

Matrix PcaModel::project(const Matrix& x) const {
    if (x.rows() != mean.size()) throw DimensionError("pca_project: dimension mismatch");
    return basis.transpose() * (x.colwise() - mean);
}

Dataset PcaModel::project(const Dataset& ds) const {
    Dataset out = ds;
    out.features = project(ds.features);
    out.feature_names.clear();
    for (int j = 0; j < dim(); ++j) out.feature_names.push_back("pc" + std::to_string(j));
    return out;
}

Vector PcaModel::reconstruct(const Vector& z) const {
    if (z.size() != basis.cols()) throw DimensionError("PcaModel::reconstruct: dimension mismatch");
    return mean + basis * z;
}

PcaModel pca_fit(const Dataset& train, int d) {
    const int limit = std::min(train.dim(), train.size());
    if (d < 1 || d > limit)
        throw ConfigError("pca_fit: d must lie in [1, min(m, N)] = [1, " + std::to_string(limit) + "]");
    PcaModel model;
    model.mean = train.features.rowwise().mean();
    const Matrix centred = train.features.colwise() - model.mean;
    Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinU);
    model.basis = svd.matrixU().leftCols(d);
    model.variances = svd.singularValues().head(d).array().square() / static_cast<double>(train.size());
    for (Eigen::Index j = 0; j < model.basis.cols(); ++j) {
        Eigen::Index arg;
        model.basis.col(j).cwiseAbs().maxCoeff(&arg);
        if (model.basis(arg, j) < 0) model.basis.col(j) *= -1.0;
    }
    return model;
}

}  // namespace adl
