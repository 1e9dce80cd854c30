#include "adl/io.hpp"

#include <fstream>
#include <sstream>

#include "adl/errors.hpp"
#include "adl/format.hpp"

namespace adl {

namespace {

using nlohmann::json;

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c == '\n' ? ' ' : c);
    }
    out.push_back('"');
    return out;
}

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vector_from_json(const json& a) {
    Vector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

std::string normalization_name(ErrorNormalization n) {
    return n == ErrorNormalization::RoundMean ? "round_mean" : "sample_mean";
}

}  // namespace

json to_json(const DictionaryFile& file) {
    const Dictionary& d = file.dictionary;
    json atoms = json::array();
    for (Eigen::Index j = 0; j < d.atoms.cols(); ++j) atoms.push_back(vector_json(d.atoms.col(j)));
    json j = {
        {"format", "adl-dictionary"},
        {"version", kDictionaryFormatVersion},
        {"method", std::string(to_string(d.method))},
        {"build_seed", d.build_seed},
        {"class_count", d.class_count},
        {"class_names", d.class_names},
        {"dim", d.dim()},
        {"size", d.size()},
        {"atom_labels", d.atom_labels},
        {"source_indices", d.source_indices},
        {"atoms", std::move(atoms)},
        {"feature_names", file.feature_names},
        {"label_column", file.label_column},
        {"build", file.build},
    };
    if (file.pca) {
        json basis = json::array();
        for (Eigen::Index c = 0; c < file.pca->basis.cols(); ++c) basis.push_back(vector_json(file.pca->basis.col(c)));
        j["pca"] = {{"mean", vector_json(file.pca->mean)}, {"basis", basis}, {"variances", vector_json(file.pca->variances)}};
    } else {
        j["pca"] = nullptr;
    }
    if (file.scaler) j["scaler"] = {{"mean", vector_json(file.scaler->mean)}, {"scale", vector_json(file.scaler->scale)}};
    else j["scaler"] = nullptr;
    return j;
}

DictionaryFile dictionary_file_from_json(const json& j) {
    try {
        if (j.value("format", std::string()) != "adl-dictionary") throw SchemaError("not an adl-dictionary file");
        if (j.at("version").get<int>() != kDictionaryFormatVersion) throw SchemaError("unsupported dictionary file version");
        DictionaryFile file;
        Dictionary& d = file.dictionary;
        d.method = parse_method(j.at("method").get<std::string>());
        d.build_seed = j.at("build_seed").get<std::uint64_t>();
        d.class_count = j.at("class_count").get<int>();
        d.class_names = j.at("class_names").get<std::vector<std::string>>();
        d.atom_labels = j.at("atom_labels").get<std::vector<int>>();
        d.source_indices = j.at("source_indices").get<std::vector<long long>>();
        const int dim = j.at("dim").get<int>();
        const auto& atoms = j.at("atoms");
        d.atoms.resize(dim, static_cast<Eigen::Index>(atoms.size()));
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (atoms[a].size() != static_cast<std::size_t>(dim)) throw SchemaError("atom length differs from dim");
            d.atoms.col(static_cast<Eigen::Index>(a)) = vector_from_json(atoms[a]);
        }
        file.feature_names = j.value("feature_names", std::vector<std::string>{});
        file.label_column = j.value("label_column", std::string());
        file.build = j.value("build", json::object());
        if (j.contains("scaler") && !j["scaler"].is_null()) {
            Scaler s{vector_from_json(j["scaler"].at("mean")), vector_from_json(j["scaler"].at("scale"))};
            file.scaler = std::move(s);
        }
        if (j.contains("pca") && !j["pca"].is_null()) {
            PcaModel p;
            p.mean = vector_from_json(j["pca"].at("mean"));
            const auto& basis = j["pca"].at("basis");
            if (static_cast<int>(basis.size()) != dim) throw SchemaError("pca basis width differs from dim");
            p.basis.resize(p.mean.size(), dim);
            for (std::size_t c = 0; c < basis.size(); ++c) {
                if (static_cast<Eigen::Index>(basis[c].size()) != p.mean.size()) throw SchemaError("pca basis column length mismatch");
                p.basis.col(static_cast<Eigen::Index>(c)) = vector_from_json(basis[c]);
            }
            p.variances = vector_from_json(j["pca"].value("variances", json::array()));
            file.pca = std::move(p);
        }
        const Eigen::Index input_dim = file.pca ? file.pca->mean.size() : dim;
        if (file.scaler && (file.scaler->mean.size() != input_dim || file.scaler->scale.size() != input_dim))
            throw SchemaError("scaler length differs from input dimension");
        d.validate();
        return file;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed dictionary file: ") + e.what());
    } catch (const ConfigError& e) {
        throw SchemaError(std::string("invalid dictionary file: ") + e.what());
    } catch (const DimensionError& e) {
        throw SchemaError(std::string("invalid dictionary file: ") + e.what());
    }
}

void save_dictionary(const DictionaryFile& file, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_json(file).dump(1) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

DictionaryFile load_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    return dictionary_file_from_json(j);
}

json to_json(const LassoConfig& cfg) {
    return {{"lambda", cfg.lambda}, {"max_iters", cfg.max_iters}, {"tol", cfg.tol}};
}

LassoConfig lasso_from_json(const json& j, LassoConfig base) {
    base.lambda = j.value("lambda", base.lambda);
    base.max_iters = j.value("max_iters", base.max_iters);
    base.tol = j.value("tol", base.tol);
    base.validate();
    return base;
}

json to_json(const ExperimentConfig& cfg) {
    json methods = json::array();
    for (auto m : cfg.methods) methods.push_back(std::string(to_string(m)));
    json ranked = json::array();
    for (auto m : cfg.rank_methods) ranked.push_back(std::string(to_string(m)));
    return {
        {"methods", methods},
        {"size_rates", cfg.size_rates},
        {"fold_count", cfg.fold_count},
        {"master_seed", cfg.master_seed},
        {"pca_dim", cfg.pca_dim},
        {"lasso", to_json(cfg.lasso)},
        {"adl", {{"rounds", cfg.adl.rounds}, {"eta", cfg.adl.eta}, {"normalization", normalization_name(cfg.adl.normalization)}}},
        {"cluster",
         {{"epochs", cfg.cluster.epochs},
          {"knn_k", cfg.cluster.knn_k},
          {"ng_step_initial", cfg.cluster.ng_step_initial},
          {"ng_step_final", cfg.cluster.ng_step_final},
          {"ng_range_initial", cfg.cluster.ng_range_initial},
          {"ng_range_final", cfg.cluster.ng_range_final},
          {"som_step_initial", cfg.cluster.som_step_initial},
          {"som_step_final", cfg.cluster.som_step_final},
          {"som_radius_initial", cfg.cluster.som_radius_initial},
          {"som_radius_final", cfg.cluster.som_radius_final}}},
        {"rank_methods", ranked},
    };
}

ExperimentConfig experiment_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("methods")) {
            cfg.methods.clear();
            for (const auto& m : j["methods"]) cfg.methods.push_back(parse_method(m.get<std::string>()));
        }
        if (j.contains("rank_methods")) {
            cfg.rank_methods.clear();
            for (const auto& m : j["rank_methods"]) cfg.rank_methods.push_back(parse_method(m.get<std::string>()));
        }
        cfg.size_rates = j.value("size_rates", cfg.size_rates);
        cfg.fold_count = j.value("fold_count", cfg.fold_count);
        cfg.master_seed = j.value("master_seed", cfg.master_seed);
        cfg.jobs = j.value("jobs", cfg.jobs);
        cfg.pca_dim = j.value("pca_dim", cfg.pca_dim);
        if (j.contains("lasso")) cfg.lasso = lasso_from_json(j["lasso"], cfg.lasso);
        if (j.contains("adl")) {
            const auto& a = j["adl"];
            cfg.adl.rounds = a.value("rounds", cfg.adl.rounds);
            cfg.adl.eta = a.value("eta", cfg.adl.eta);
            const std::string norm = a.value("normalization", normalization_name(cfg.adl.normalization));
            if (norm == "round_mean") cfg.adl.normalization = ErrorNormalization::RoundMean;
            else if (norm == "sample_mean") cfg.adl.normalization = ErrorNormalization::SampleMean;
            else throw ConfigError("adl.normalization must be round_mean or sample_mean");
        }
        if (j.contains("cluster")) {
            const auto& c = j["cluster"];
            auto& k = cfg.cluster;
            k.epochs = c.value("epochs", k.epochs);
            k.knn_k = c.value("knn_k", k.knn_k);
            k.ng_step_initial = c.value("ng_step_initial", k.ng_step_initial);
            k.ng_step_final = c.value("ng_step_final", k.ng_step_final);
            k.ng_range_initial = c.value("ng_range_initial", k.ng_range_initial);
            k.ng_range_final = c.value("ng_range_final", k.ng_range_final);
            k.som_step_initial = c.value("som_step_initial", k.som_step_initial);
            k.som_step_final = c.value("som_step_final", k.som_step_final);
            k.som_radius_initial = c.value("som_radius_initial", k.som_radius_initial);
            k.som_radius_final = c.value("som_radius_final", k.som_radius_final);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void write_report_csv(const EvaluationReport& report, std::ostream& out) {
    out << "dataset,method,rate,fold,dict_size,test_count,correct,accuracy,mean_recon_error,nonconverged,degenerate,status,error\n";
    for (const auto& [key, cell] : report.cells) {
        out << csv_cell(key.dataset) << ',' << to_string(key.method) << ',' << format_double(key.rate) << ',' << key.fold
            << ',' << cell.dict_size << ',' << cell.test_count << ',' << cell.correct << ','
            << format_double(cell.accuracy) << ',' << format_double(cell.mean_recon_error) << ',' << cell.nonconverged
            << ',' << cell.degenerate << ',' << (cell.failed ? "error" : "ok") << ',' << csv_cell(cell.error) << '\n';
    }
}

std::string report_csv(const EvaluationReport& report) {
    std::ostringstream out;
    write_report_csv(report, out);
    return out.str();
}

void write_timings_csv(const EvaluationReport& report, std::ostream& out) {
    out << "dataset,method,rate,fold,wall_time_s\n";
    for (const auto& [key, cell] : report.cells)
        out << csv_cell(key.dataset) << ',' << to_string(key.method) << ',' << format_double(key.rate) << ',' << key.fold
            << ',' << format_fixed(cell.wall_time_s, 6) << '\n';
}

json report_summary(const EvaluationReport& report) {
    json methods = json::array();
    for (auto m : report.methods) methods.push_back(std::string(to_string(m)));
    json aggregates = json::array();
    for (const auto& [key, acc] : report.aggregates)
        aggregates.push_back({{"method", std::string(to_string(key.method))}, {"rate", key.rate}, {"mean_accuracy", acc}});
    json per_dataset = json::array();
    for (const auto& [key, acc] : report.dataset_accuracy)
        per_dataset.push_back({{"dataset", key.first},
                               {"method", std::string(to_string(key.second.method))},
                               {"rate", key.second.rate},
                               {"mean_accuracy", acc},
                               {"mean_recon_error", report.dataset_recon_error.at(key)}});
    json ranks = json::array();
    for (const auto& [key, rows] : report.ranks)
        for (const auto& r : rows)
            ranks.push_back({{"dataset", key.dataset},
                             {"rate", key.rate},
                             {"method", std::string(to_string(r.method))},
                             {"accuracy_rank", r.accuracy_rank},
                             {"recon_rank", r.recon_rank}});
    json mean_ranks = json::array();
    for (const auto& [key, r] : report.mean_ranks)
        mean_ranks.push_back({{"method", std::string(to_string(key.method))},
                              {"rate", key.rate},
                              {"accuracy_rank", r.accuracy_rank},
                              {"recon_rank", r.recon_rank}});
    return {
        {"schema_version", kReportSchemaVersion},
        {"datasets", report.datasets},
        {"methods", methods},
        {"rates", report.rates},
        {"fold_count", report.fold_count},
        {"cell_count", report.cells.size()},
        {"failed_cells", report.failed_cells()},
        {"nonconverged_codings", report.nonconverged_codings()},
        {"aggregates", aggregates},
        {"per_dataset", per_dataset},
        {"ranks", ranks},
        {"mean_ranks", mean_ranks},
    };
}

std::string mean_accuracy_table_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "method";
    for (double r : report.rates) out << ',' << format_double(r);
    out << '\n';
    for (auto m : report.methods) {
        out << to_string(m);
        for (double r : report.rates) {
            auto it = report.aggregates.find(MethodRate{m, r});
            out << ',' << (it == report.aggregates.end() ? std::string() : format_fixed(100.0 * it->second, 2));
        }
        out << '\n';
    }
    return out.str();
}

std::string mean_accuracy_table_markdown(const EvaluationReport& report) {
    std::ostringstream out;
    out << "| Dictionary size (rate) |";
    for (double r : report.rates) out << ' ' << format_double(r) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < report.rates.size(); ++i) out << "---|";
    out << '\n';
    for (auto m : report.methods) {
        out << "| " << to_string(m) << " |";
        for (double r : report.rates) {
            auto it = report.aggregates.find(MethodRate{m, r});
            out << ' ' << (it == report.aggregates.end() ? std::string("-") : format_fixed(100.0 * it->second, 2)) << " |";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace adl
