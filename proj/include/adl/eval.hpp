#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adl/data.hpp"
#include "adl/dictionaries.hpp"
#include "adl/lasso.hpp"
#include "adl/src.hpp"

namespace adl {

struct ExperimentConfig {
    std::vector<DictionaryMethod> methods{DictionaryMethod::Adl, DictionaryMethod::Wd, DictionaryMethod::Random,
                                          DictionaryMethod::Somd, DictionaryMethod::Ngasd};
    std::vector<double> size_rates{0.1, 0.2, 0.3, 0.4, 0.5};
    int fold_count = 5;
    /// Template for ADL; `n` and `seed` are set per cell and `lasso` is replaced by `lasso` below.
    AdlConfig adl;
    /// Template for SOM/NGAS; `n`, `seed` and `som_grid` are set per cell.
    ClusterConfig cluster;
    /// One lasso setting for probing, coding and classification.
    LassoConfig lasso;
    std::uint64_t master_seed = 0;
    /// When > 0, each fold is projected onto this many principal components
    /// fitted on its (standardized) training split.
    int pca_dim = 0;
    /// Methods ranked against each other per dataset and rate.
    std::vector<DictionaryMethod> rank_methods{DictionaryMethod::Adl, DictionaryMethod::Somd, DictionaryMethod::Ngasd};
    /// Worker threads for independent cells.
    int jobs = 1;

    void validate() const;
};

/// round(rate * train_size), half up, clamped to [1, train_size].
int dictionary_size(double rate, int train_size);

/// Seed of one (method, rate, fold) cell, derived from the master seed.
std::uint64_t cell_seed(std::uint64_t master_seed, DictionaryMethod method, double rate, int fold);

/// Seed of the fold plan, derived from the master seed.
std::uint64_t fold_seed(std::uint64_t master_seed);

struct FoldSplit {
    Dataset train;
    Dataset test;
    Scaler scaler;
    std::optional<PcaModel> pca;
};

/// Training/test split of fold `fold`, standardized (and projected when
/// cfg.pca_dim > 0) with statistics of the training split only.
FoldSplit prepare_fold(const Dataset& ds, const FoldPlan& plan, int fold, const ExperimentConfig& cfg);

/// Builds one dictionary of `n` atoms from an already standardized training split.
/// `ledger`, when given, receives the ADL error ledger.
Dictionary build_dictionary(const Dataset& train, DictionaryMethod method, int n, std::uint64_t seed,
                            const ExperimentConfig& cfg, ErrorLedger* ledger = nullptr);

struct CellKey {
    std::string dataset;
    DictionaryMethod method;
    double rate;
    int fold;

    auto operator<=>(const CellKey&) const = default;
};

struct CellResult {
    int dict_size = 0;
    int test_count = 0;
    int correct = 0;
    /// correct / test_count.
    double accuracy = 0.0;
    /// Mean over test samples of ||y - Dx||, x the full code.
    double mean_recon_error = 0.0;
    /// Codings (probe, training or test) that stopped at max_iters.
    int nonconverged = 0;
    /// Test samples whose code was all zero.
    int degenerate = 0;
    double wall_time_s = 0.0;
    bool failed = false;
    std::string error;
};

/// SRC accuracy and mean reconstruction error of `dict` over `test`.
CellResult evaluate_dictionary(const Dictionary& dict, const Dataset& test, const LassoConfig& lasso);

struct MethodRate {
    DictionaryMethod method;
    double rate;

    auto operator<=>(const MethodRate&) const = default;
};

struct DatasetRate {
    std::string dataset;
    double rate;

    auto operator<=>(const DatasetRate&) const = default;
};

/// Rank 1 is best; tied methods share the average rank.
struct MethodRank {
    DictionaryMethod method;
    double accuracy_rank = 0.0;
    double recon_rank = 0.0;
};

struct EvaluationReport {
    std::vector<std::string> datasets;
    std::vector<DictionaryMethod> methods;
    std::vector<double> rates;
    int fold_count = 0;
    std::vector<DictionaryMethod> rank_methods;

    std::map<CellKey, CellResult> cells;
    /// Per (method, rate): unweighted mean over datasets of the per-dataset mean fold accuracy.
    std::map<MethodRate, double> aggregates;
    /// Per (dataset, rate): mean fold accuracy of each method.
    std::map<std::pair<std::string, MethodRate>, double> dataset_accuracy;
    /// Per (dataset, rate): mean fold reconstruction error of each method.
    std::map<std::pair<std::string, MethodRate>, double> dataset_recon_error;
    std::map<DatasetRate, std::vector<MethodRank>> ranks;
    /// Per (method, rate): ranks averaged over datasets.
    std::map<MethodRate, MethodRank> mean_ranks;

    [[nodiscard]] int failed_cells() const;
    [[nodiscard]] int nonconverged_codings() const;
};

/// Recomputes aggregates, per-dataset means and ranks from `cells`. Failed cells are skipped.
void summarize(EvaluationReport& report);

/// Cross-validated comparison of every configured method and size rate on one dataset.
EvaluationReport run_experiment(const Dataset& ds, const ExperimentConfig& cfg, const std::string& dataset_id = "dataset");

/// Merges per-dataset reports sharing methods, rates and fold count. Throws ConfigError otherwise.
EvaluationReport aggregate_report(const std::vector<EvaluationReport>& reports);

struct PairedEntry {
    std::string dataset;
    int fold = 0;
    double accuracy_a = 0.0;
    double accuracy_b = 0.0;
    double difference = 0.0;
};

struct PairedSummary {
    DictionaryMethod a;
    DictionaryMethod b;
    double rate = 0.0;
    std::vector<PairedEntry> entries;
    double mean_difference = 0.0;
    int wins = 0;
    int losses = 0;
    int ties = 0;
};

/// Per-fold paired accuracy differences a - b at `rate`. Throws MissingCellError.
PairedSummary compare_methods(const EvaluationReport& report, DictionaryMethod a, DictionaryMethod b, double rate);

}  // namespace adl
