#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "adl/data.hpp"
#include "adl/dictionaries.hpp"
#include "adl/errors.hpp"
#include "adl/eval.hpp"
#include "adl/io.hpp"
#include "adl/lasso.hpp"
#include "adl/src.hpp"

namespace py = pybind11;
using namespace adl;

namespace {

// Copies `value` into `cfg.*field` when the keyword was passed.
template <typename T, typename Cfg>
void assign(const py::kwargs& kw, const char* name, Cfg& cfg, T Cfg::*field) {
    if (kw.contains(name)) cfg.*field = kw[name].cast<T>();
}

LassoConfig lasso_config(double lam, int max_iters, double tol) {
    LassoConfig cfg;
    cfg.lambda = lam;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Active dictionary learning and sparse-representation classification.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<MissingCellError>(m, "MissingCellError", base.ptr());

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def(py::init([](Matrix features, std::vector<int> labels, int class_count) {
                 Dataset ds;
                 ds.features = std::move(features);
                 ds.labels = std::move(labels);
                 ds.class_count = class_count;
                 ds.validate(false);
                 return ds;
             }),
             py::arg("features"), py::arg("labels"), py::arg("class_count"))
        .def_readwrite("features", &Dataset::features)
        .def_readwrite("labels", &Dataset::labels)
        .def_readwrite("class_count", &Dataset::class_count)
        .def_readwrite("class_names", &Dataset::class_names)
        .def_readwrite("feature_names", &Dataset::feature_names)
        .def_readwrite("sample_ids", &Dataset::sample_ids)
        .def_property_readonly("dim", &Dataset::dim)
        .def_property_readonly("size", &Dataset::size)
        .def("subset", &Dataset::subset, py::arg("indices"))
        .def("validate", &Dataset::validate, py::arg("require_all_classes") = true);

    m.def(
        "load_csv",
        [](const std::filesystem::path& path, const std::string& label_column, int label_index, bool has_header,
           const std::string& id_column) {
            CsvSchema s;
            s.label_column = label_column;
            s.label_index = label_index;
            s.has_header = has_header;
            s.id_column = id_column;
            return load_csv(path, s);
        },
        py::arg("path"), py::arg("label_column") = "", py::arg("label_index") = -1, py::arg("has_header") = true,
        py::arg("id_column") = "");
    m.def("write_csv", &write_csv, py::arg("dataset"), py::arg("path"), py::arg("label_column") = "label");

    py::class_<Scaler>(m, "Scaler")
        .def_readwrite("mean", &Scaler::mean)
        .def_readwrite("scale", &Scaler::scale)
        .def("transform", py::overload_cast<const Dataset&>(&Scaler::transform, py::const_), py::arg("dataset"));
    m.def("fit_scaler", &fit_scaler, py::arg("dataset"));
    m.def("standardize", &standardize, py::arg("dataset"));

    py::class_<FoldPlan>(m, "FoldPlan")
        .def_readonly("fold_count", &FoldPlan::fold_count)
        .def_readonly("assignments", &FoldPlan::assignments)
        .def_readonly("seed", &FoldPlan::seed)
        .def("train_indices", &FoldPlan::train_indices, py::arg("fold"))
        .def("test_indices", &FoldPlan::test_indices, py::arg("fold"));
    m.def("make_folds", &make_folds, py::arg("dataset"), py::arg("fold_count"), py::arg("seed"));

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("basis", &PcaModel::basis)
        .def_readonly("variances", &PcaModel::variances)
        .def_property_readonly("dim", &PcaModel::dim)
        .def("project", py::overload_cast<const Matrix&>(&PcaModel::project, py::const_), py::arg("features"))
        .def("project_dataset", py::overload_cast<const Dataset&>(&PcaModel::project, py::const_), py::arg("dataset"));
    m.def("pca_fit", &pca_fit, py::arg("dataset"), py::arg("d"));

    py::class_<LassoConfig>(m, "LassoConfig")
        .def(py::init(&lasso_config), py::arg("lam") = 0.1, py::arg("max_iters") = 10000, py::arg("tol") = 1e-6)
        .def_readwrite("lam", &LassoConfig::lambda)
        .def_readwrite("max_iters", &LassoConfig::max_iters)
        .def_readwrite("tol", &LassoConfig::tol);

    py::class_<SparseCode>(m, "SparseCode")
        .def_readonly("coeffs", &SparseCode::coeffs)
        .def_readonly("objective", &SparseCode::objective)
        .def_readonly("kkt_residual", &SparseCode::kkt_residual)
        .def_readonly("iterations", &SparseCode::iterations)
        .def_readonly("converged", &SparseCode::converged)
        .def_property_readonly("nnz", &SparseCode::nnz);

    m.def(
        "solve_lasso",
        [](const Vector& y, const Matrix& dict, double lam, int max_iters, double tol) {
            return solve_lasso(y, dict, lasso_config(lam, max_iters, tol));
        },
        py::arg("y"), py::arg("dictionary"), py::arg("lam") = 0.1, py::arg("max_iters") = 10000, py::arg("tol") = 1e-6);
    m.def("lasso_objective", &lasso_objective, py::arg("y"), py::arg("dictionary"), py::arg("x"), py::arg("lam"));
    m.def("lasso_kkt_residual", &lasso_kkt_residual, py::arg("y"), py::arg("dictionary"), py::arg("x"), py::arg("lam"));

    py::enum_<DictionaryMethod>(m, "DictionaryMethod")
        .value("ADL", DictionaryMethod::Adl)
        .value("WD", DictionaryMethod::Wd)
        .value("RANDOM", DictionaryMethod::Random)
        .value("SOMD", DictionaryMethod::Somd)
        .value("NGASD", DictionaryMethod::Ngasd);

    py::class_<Dictionary>(m, "Dictionary")
        .def_readonly("atoms", &Dictionary::atoms)
        .def_readonly("atom_labels", &Dictionary::atom_labels)
        .def_readonly("source_indices", &Dictionary::source_indices)
        .def_readonly("method", &Dictionary::method)
        .def_readonly("build_seed", &Dictionary::build_seed)
        .def_readonly("class_count", &Dictionary::class_count)
        .def_readonly("class_names", &Dictionary::class_names)
        .def_property_readonly("size", &Dictionary::size)
        .def_property_readonly("dim", &Dictionary::dim)
        .def("class_histogram", &Dictionary::class_histogram);

    py::class_<ClassResiduals>(m, "ClassResiduals")
        .def_readonly("residuals", &ClassResiduals::residuals)
        .def_readonly("argmin_label", &ClassResiduals::argmin_label)
        .def_readonly("degenerate", &ClassResiduals::degenerate);

    py::class_<SrcResult>(m, "SrcResult")
        .def_readonly("label", &SrcResult::label)
        .def_readonly("residuals", &SrcResult::residuals)
        .def_readonly("code", &SrcResult::code);

    m.def(
        "src_classify",
        [](const Vector& y, const Dictionary& dict, double lam) { return src_classify(y, dict, lasso_config(lam, 10000, 1e-6)); },
        py::arg("y"), py::arg("dictionary"), py::arg("lam") = 0.1);
    m.def(
        "src_predict",
        [](const Matrix& samples, const Dictionary& dict, double lam) {
            const SrcClassifier clf(dict, lasso_config(lam, 10000, 1e-6));
            std::vector<int> labels;
            labels.reserve(static_cast<std::size_t>(samples.cols()));
            for (Eigen::Index i = 0; i < samples.cols(); ++i) labels.push_back(clf.classify(samples.col(i)).label);
            return labels;
        },
        py::arg("samples"), py::arg("dictionary"), py::arg("lam") = 0.1,
        "Labels for every column of `samples`.");

    py::class_<ErrorLedger>(m, "ErrorLedger")
        .def_readonly("recon", &ErrorLedger::recon)
        .def_readonly("classif", &ErrorLedger::classif)
        .def_readonly("total", &ErrorLedger::total)
        .def_readonly("round_mean_recon", &ErrorLedger::round_mean_recon)
        .def_readonly("probe_dict_indices", &ErrorLedger::probe_dict_indices)
        .def_readonly("predicted", &ErrorLedger::predicted)
        .def_readonly("selected", &ErrorLedger::selected)
        .def_readonly("nonconverged", &ErrorLedger::nonconverged);

    py::class_<AdlResult>(m, "AdlResult")
        .def_readonly("dictionary", &AdlResult::dictionary)
        .def_readonly("ledger", &AdlResult::ledger);

    m.def(
        "adl_learn",
        [](const Dataset& train, int n, int rounds, double eta, double lam, std::uint64_t seed, bool sample_mean) {
            AdlConfig cfg;
            cfg.n = n;
            cfg.rounds = rounds;
            cfg.eta = eta;
            cfg.lasso.lambda = lam;
            cfg.seed = seed;
            cfg.normalization = sample_mean ? ErrorNormalization::SampleMean : ErrorNormalization::RoundMean;
            return adl_learn(train, cfg);
        },
        py::arg("train"), py::arg("n"), py::arg("rounds") = 5, py::arg("eta") = 5.0, py::arg("lam") = 0.1,
        py::arg("seed") = 0, py::arg("sample_mean") = false);
    m.def("wd_dictionary", &wd_dictionary, py::arg("train"));
    m.def("random_dictionary", &random_dictionary, py::arg("train"), py::arg("n"), py::arg("seed"));

    auto cluster = [](bool som) {
        return [som](const Dataset& train, int n, std::uint64_t seed, const py::kwargs& kw) {
            ClusterConfig cfg;
            cfg.n = n;
            cfg.seed = seed;
            assign(kw, "epochs", cfg, &ClusterConfig::epochs);
            assign(kw, "knn_k", cfg, &ClusterConfig::knn_k);
            assign(kw, "som_grid", cfg, &ClusterConfig::som_grid);
            return som ? som_dictionary(train, cfg) : ngas_dictionary(train, cfg);
        };
    };
    m.def("som_dictionary", cluster(true), py::arg("train"), py::arg("n"), py::arg("seed") = 0,
          "Keywords: epochs, knn_k, som_grid.");
    m.def("ngas_dictionary", cluster(false), py::arg("train"), py::arg("n"), py::arg("seed") = 0,
          "Keywords: epochs, knn_k.");

    py::class_<EvaluationReport>(m, "EvaluationReport")
        .def_property_readonly("failed_cells", &EvaluationReport::failed_cells)
        .def_property_readonly("nonconverged_codings", &EvaluationReport::nonconverged_codings)
        .def("summary_json", [](const EvaluationReport& r) { return report_summary(r).dump(); })
        .def("cells_csv", &report_csv)
        .def("mean_accuracy_csv", &mean_accuracy_table_csv)
        .def("mean_accuracy_markdown", &mean_accuracy_table_markdown);

    m.def(
        "run_experiment_json",
        [](const Dataset& ds, const std::string& config, const std::string& dataset_id) {
            nlohmann::json parsed;
            try {
                parsed = nlohmann::json::parse(config);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("experiment config: ") + e.what());
            }
            const ExperimentConfig cfg = experiment_from_json(parsed);
            py::gil_scoped_release release;
            return run_experiment(ds, cfg, dataset_id);
        },
        py::arg("dataset"), py::arg("config_json"), py::arg("dataset_id") = "dataset");
    m.def(
        "aggregate_reports", [](const std::vector<EvaluationReport>& reports) { return aggregate_report(reports); },
        py::arg("reports"));

    py::class_<DictionaryFile>(m, "DictionaryFile")
        .def_readonly("dictionary", &DictionaryFile::dictionary)
        .def_readonly("scaler", &DictionaryFile::scaler)
        .def_readonly("pca", &DictionaryFile::pca)
        .def_readonly("feature_names", &DictionaryFile::feature_names)
        .def_readonly("label_column", &DictionaryFile::label_column);
    m.def("load_dictionary", &load_dictionary, py::arg("path"));
}
