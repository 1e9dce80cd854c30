#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "adl/errors.hpp"
#include "adl/format.hpp"
#include "chart.hpp"
#include "manifest.hpp"

namespace adl::cli {

namespace {

ExperimentConfig with_overrides(ExperimentConfig cfg, std::optional<double> lambda, std::optional<std::uint64_t> seed,
                                std::optional<int> jobs) {
    if (lambda) cfg.lasso.lambda = *lambda;
    if (seed) cfg.master_seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    cfg.validate();
    return cfg;
}

std::string label_column_name(const DatasetEntry& entry) {
    if (!entry.schema.label_column.empty()) return entry.schema.label_column;
    if (!entry.schema.has_header) return {};
    const CsvTable table = read_csv_table(entry.path, true);
    const long width = static_cast<long>(table.header.size());
    const long idx = entry.schema.label_index < 0 ? width + entry.schema.label_index : entry.schema.label_index;
    return idx >= 0 && idx < width ? table.header[static_cast<std::size_t>(idx)] : std::string();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failure on " + path.string());
}

std::string file_stem_for(const std::string& id) {
    std::string s;
    for (char c : id) s.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
    return s;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
    if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
        dynamic_cast<const DimensionError*>(&e) || dynamic_cast<const MissingCellError*>(&e))
        return kExitData;
    return kExitUnexpected;
}

LearnOutcome learn(const LearnOptions& opts) {
    const RunManifest manifest = load_manifest(opts.manifest);
    const ExperimentConfig cfg = with_overrides(manifest.experiment, opts.lambda, opts.seed, std::nullopt);
    const DictionaryMethod method = parse_method(opts.method);
    if (!(opts.rate > 0.0 && opts.rate <= 1.0)) throw ConfigError("--rate must lie in (0, 1]");
    const DatasetEntry& entry = manifest.dataset(opts.dataset);

    const Dataset ds = load_csv(entry.path, entry.schema);
    const FoldPlan plan = make_folds(ds, cfg.fold_count, fold_seed(cfg.master_seed));
    if (opts.fold < 0 || opts.fold >= cfg.fold_count) throw ConfigError("--fold must lie in [0, fold_count)");
    FoldSplit split = prepare_fold(ds, plan, opts.fold, cfg);

    const double rate = method == DictionaryMethod::Wd ? 1.0 : opts.rate;
    const int n = dictionary_size(rate, split.train.size());
    const std::uint64_t seed = cell_seed(cfg.master_seed, method, rate, opts.fold);
    ErrorLedger ledger;
    LearnOutcome outcome;
    outcome.file.dictionary = build_dictionary(split.train, method, n, seed, cfg, &ledger);
    if (method == DictionaryMethod::Adl) outcome.ledger = std::move(ledger);
    outcome.file.scaler = split.scaler;
    outcome.file.pca = split.pca;
    outcome.file.feature_names = ds.feature_names;
    outcome.file.label_column = label_column_name(entry);
    outcome.file.build = {
        {"dataset", entry.id},
        {"fold", opts.fold},
        {"rate", rate},
        {"experiment", to_json(cfg)},
        {"lasso", to_json(cfg.lasso)},
    };
    if (outcome.ledger) {
        outcome.file.build["ledger"] = {
            {"round_mean_recon", std::vector<double>(outcome.ledger->round_mean_recon.data(),
                                                     outcome.ledger->round_mean_recon.data() + outcome.ledger->round_mean_recon.size())},
            {"probe_dict_indices", outcome.ledger->probe_dict_indices},
            {"selected", outcome.ledger->selected},
            {"nonconverged", outcome.ledger->nonconverged},
        };
    }
    outcome.train_size = split.train.size();
    outcome.test_size = split.test.size();

    if (!opts.out.empty()) save_dictionary(outcome.file, opts.out);
    if (opts.test_out) {
        const std::string label = outcome.file.label_column.empty() ? "label" : outcome.file.label_column;
        write_csv(ds.subset(plan.test_indices(opts.fold)), *opts.test_out, label);
    }
    return outcome;
}

int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const LearnOutcome res = learn(opts);
        const Dictionary& d = res.file.dictionary;
        out << "method: " << to_string(d.method) << "\n";
        out << "training samples: " << res.train_size << " (held-out fold " << opts.fold << ": " << res.test_size << ")\n";
        out << "atoms: " << d.size() << "\n";
        out << "class histogram:";
        const auto hist = d.class_histogram();
        for (std::size_t c = 0; c < hist.size(); ++c)
            out << ' ' << (c < d.class_names.size() ? d.class_names[c] : std::to_string(c)) << '=' << hist[c];
        out << "\n";
        if (res.ledger) {
            const ErrorLedger& l = *res.ledger;
            out << "ledger: " << l.recon.rows() << " probe rounds\n";
            for (Eigen::Index k = 0; k < l.recon.rows(); ++k) {
                const auto misclassified = (l.classif.row(k).array() > 0.0).count();
                out << "  round " << k << ": mean recon error " << format_fixed(l.round_mean_recon(k), 6)
                    << ", misclassified " << misclassified << "/" << l.recon.cols() << "\n";
            }
            out << "  total error range: [" << format_fixed(l.total.minCoeff(), 6) << ", "
                << format_fixed(l.total.maxCoeff(), 6) << "]\n";
            out << "  nonconverged codings: " << l.nonconverged << "\n";
        }
        if (!opts.out.empty()) out << "wrote " << opts.out.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "learn: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

double ClassifyOutcome::accuracy() const {
    return predictions.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(predictions.size());
}

ClassifyOutcome classify(const ClassifyOptions& opts) {
    const DictionaryFile file = load_dictionary(opts.dict);
    LassoConfig lasso;
    if (file.build.contains("lasso")) lasso = lasso_from_json(file.build["lasso"]);
    if (opts.lambda) lasso.lambda = *opts.lambda;
    lasso.validate();

    const CsvTable table = read_csv_table(opts.data, true);
    if (table.header.empty() || table.rows.empty()) throw SchemaError(opts.data.string() + ": no data rows");

    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const std::string label_name = opts.label_column.value_or(file.label_column);
    const auto label_col = label_name.empty() ? std::nullopt : column(label_name);
    if (opts.label_column && !label_col) throw SchemaError("data file has no column '" + *opts.label_column + "'");
    const auto id_col = column("id");

    std::vector<std::size_t> feature_cols;
    if (!file.feature_names.empty() && std::all_of(file.feature_names.begin(), file.feature_names.end(),
                                                   [&](const std::string& n) { return column(n).has_value(); })) {
        for (const auto& n : file.feature_names) feature_cols.push_back(*column(n));
    } else {
        for (std::size_t j = 0; j < table.header.size(); ++j)
            if (j != label_col && j != id_col) feature_cols.push_back(j);
    }
    const Eigen::Index input_dim = file.pca ? file.pca->mean.size() : file.dictionary.dim();
    if (static_cast<Eigen::Index>(feature_cols.size()) != input_dim)
        throw DimensionError("data file has " + std::to_string(feature_cols.size()) + " feature columns, dictionary expects " +
                             std::to_string(input_dim));

    std::map<std::string, int> class_ids;
    for (std::size_t c = 0; c < file.dictionary.class_names.size(); ++c)
        class_ids[file.dictionary.class_names[c]] = static_cast<int>(c);

    Matrix raw(input_dim, static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.header.size())
            throw SchemaError(opts.data.string() + ": row " + std::to_string(r + 1) + " has the wrong cell count");
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            double v;
            if (!parse_number(row[feature_cols[f]], v))
                throw SchemaError(opts.data.string() + ": non-numeric cell '" + row[feature_cols[f]] + "'");
            raw(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(r)) = v;
        }
    }
    Matrix x = file.scaler ? file.scaler->transform(raw) : raw;
    if (file.pca) x = file.pca->project(x);

    const SrcClassifier classifier(file.dictionary, lasso);
    ClassifyOutcome outcome;
    outcome.class_names = file.dictionary.class_names;
    outcome.labeled = label_col.has_value();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const SrcResult res = classifier.classify(x.col(static_cast<Eigen::Index>(r)));
        Prediction p;
        p.id = id_col ? table.rows[r][*id_col] : std::to_string(r);
        p.predicted = res.label;
        p.residuals = res.residuals.residuals;
        p.nnz = res.code.nnz();
        p.degenerate = res.residuals.degenerate;
        if (label_col) {
            auto it = class_ids.find(table.rows[r][*label_col]);
            p.truth = it == class_ids.end() ? -1 : it->second;
            if (p.truth == p.predicted) ++outcome.correct;
        }
        outcome.predictions.push_back(std::move(p));
    }
    return outcome;
}

void write_predictions_csv(const ClassifyOutcome& outcome, std::ostream& out) {
    auto name = [&](int c) {
        return c >= 0 && static_cast<std::size_t>(c) < outcome.class_names.size() ? outcome.class_names[static_cast<std::size_t>(c)]
                                                                                  : std::to_string(c);
    };
    out << "id,predicted,predicted_name";
    if (outcome.labeled) out << ",true,true_name";
    out << ",nnz,degenerate";
    for (std::size_t c = 0; c < outcome.class_names.size(); ++c) out << ",residual_" << csv_cell(outcome.class_names[c]);
    out << '\n';
    for (const auto& p : outcome.predictions) {
        out << csv_cell(p.id) << ',' << p.predicted << ',' << csv_cell(name(p.predicted));
        if (outcome.labeled) out << ',' << p.truth << ',' << (p.truth < 0 ? std::string() : csv_cell(name(p.truth)));
        out << ',' << p.nnz << ',' << (p.degenerate ? 1 : 0);
        for (Eigen::Index c = 0; c < p.residuals.size(); ++c) out << ',' << format_double(p.residuals(c));
        out << '\n';
    }
}

int cmd_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const ClassifyOutcome res = classify(opts);
        std::ofstream file(opts.out);
        if (!file) throw IoError("cannot write " + opts.out.string());
        write_predictions_csv(res, file);
        if (!file) throw IoError("write failure on " + opts.out.string());
        out << "classified " << res.predictions.size() << " samples\n";
        if (res.labeled)
            out << "accuracy: " << format_double(res.accuracy()) << " (" << res.correct << "/" << res.predictions.size()
                << ")\n";
        out << "wrote " << opts.out.string() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        err << "classify: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

EvaluateOutcome evaluate(const EvaluateOptions& opts, std::ostream* log) {
    const RunManifest manifest = load_manifest(opts.manifest);
    const ExperimentConfig cfg = with_overrides(manifest.experiment, opts.lambda, opts.seed, opts.jobs);

    EvaluateOutcome outcome;
    outcome.out_dir = opts.out_dir.value_or(manifest.output_dir);
    std::vector<EvaluationReport> reports;
    for (const auto& entry : manifest.datasets) {
        try {
            const Dataset ds = load_csv(entry.path, entry.schema);
            if (log) *log << "evaluating " << entry.id << " (m=" << ds.dim() << ", N=" << ds.size() << ", c=" << ds.class_count << ")\n";
            reports.push_back(run_experiment(ds, cfg, entry.id));
        } catch (const Error& e) {
            if (log) *log << "dataset " << entry.id << " failed: " << e.what() << "\n";
            outcome.failed_datasets.push_back(entry.id);
        }
    }
    if (reports.empty()) throw SchemaError("no dataset could be evaluated");
    outcome.report = aggregate_report(reports);

    std::filesystem::create_directories(outcome.out_dir / "charts");
    write_text(outcome.out_dir / "cells.csv", report_csv(outcome.report));
    std::ostringstream timings;
    write_timings_csv(outcome.report, timings);
    write_text(outcome.out_dir / "timings.csv", timings.str());
    nlohmann::json summary = report_summary(outcome.report);
    summary["experiment"] = to_json(cfg);
    summary["failed_datasets"] = outcome.failed_datasets;
    write_text(outcome.out_dir / "summary.json", summary.dump(2) + "\n");
    write_text(outcome.out_dir / "mean_accuracy.csv", mean_accuracy_table_csv(outcome.report));
    write_text(outcome.out_dir / "mean_accuracy.md", mean_accuracy_table_markdown(outcome.report));
    for (const auto& id : outcome.report.datasets)
        write_text(outcome.out_dir / "charts" / (file_stem_for(id) + ".svg"), render_trend_svg(outcome.report, id));
    return outcome;
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const EvaluateOutcome res = evaluate(opts, &out);
        out << "\nMean accuracy [%] by dictionary size rate\n" << mean_accuracy_table_markdown(res.report);
        out << "cells: " << res.report.cells.size() << ", failed: " << res.report.failed_cells()
            << ", nonconverged codings: " << res.report.nonconverged_codings() << "\n";
        out << "wrote " << res.out_dir.string() << "\n";
        if (!res.failed_datasets.empty()) return kExitData;
        if (res.report.failed_cells() > 0) return kExitPartialFailure;
        return kExitOk;
    } catch (const std::exception& e) {
        err << "evaluate: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace adl::cli
