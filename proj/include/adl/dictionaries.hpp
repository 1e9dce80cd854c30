#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "adl/data.hpp"
#include "adl/lasso.hpp"
#include "adl/src.hpp"

namespace adl {

/// How the classification error of a misclassified sample is scaled.
enum class ErrorNormalization {
    /// eta * mean reconstruction error over all samples of the same probe round.
    RoundMean,
    /// eta * mean reconstruction error of the same sample over all probe rounds.
    SampleMean,
};

struct AdlConfig {
    /// Target atom count.
    int n = 1;
    /// Number of random probe dictionaries.
    int rounds = 5;
    /// Weight of the classification error.
    double eta = 5.0;
    LassoConfig lasso;
    std::uint64_t seed = 0;
    ErrorNormalization normalization = ErrorNormalization::RoundMean;

    void validate(int train_size) const;
};

/// Per-sample error bookkeeping of the active selection.
struct ErrorLedger {
    /// rounds x N reconstruction errors.
    Matrix recon;
    /// rounds x N classification errors (0 when the probe classified correctly).
    Matrix classif;
    /// Per-sample total: row-sum of recon plus row-sum of classif, computed once.
    Vector total;
    /// Mean of each round's reconstruction errors over all samples.
    Vector round_mean_recon;
    /// Training indices of each probe dictionary.
    std::vector<std::vector<int>> probe_dict_indices;
    /// rounds x N SRC predictions under each probe.
    std::vector<std::vector<int>> predicted;
    /// Indices selected as atoms, by descending total (ties: lower index first).
    std::vector<int> selected;
    /// Probe codings that hit max_iters.
    int nonconverged = 0;
};

struct AdlResult {
    Dictionary dictionary;
    ErrorLedger ledger;
};

/// Active dictionary learning: score every training sample by its accumulated
/// reconstruction and SRC classification error over `rounds` random probe
/// dictionaries, then keep the `n` highest-scoring samples as atoms.
AdlResult adl_learn(const Dataset& train, const AdlConfig& cfg);

/// Every training sample is an atom, in training order.
Dictionary wd_dictionary(const Dataset& train);

/// `n` distinct uniformly drawn training samples, stored in ascending index order.
Dictionary random_dictionary(const Dataset& train, int n, std::uint64_t seed);

struct ClusterConfig {
    int n = 1;
    int epochs = 50;
    std::uint64_t seed = 0;
    /// SOM grid (rows, cols); default picks the most square factorisation of n.
    std::optional<std::pair<int, int>> som_grid;
    int knn_k = 5;

    // Neural gas: exponential decay of step size and rank neighbourhood.
    double ng_step_initial = 0.5;
    double ng_step_final = 0.005;
    /// Initial neighbourhood range; <= 0 means n / 2.
    double ng_range_initial = 0.0;
    double ng_range_final = 0.01;

    // SOM: linear decay of step size and Gaussian grid radius.
    double som_step_initial = 0.5;
    double som_step_final = 0.01;
    /// Initial radius; <= 0 means max(rows, cols) / 2.
    double som_radius_initial = 0.0;
    double som_radius_final = 0.5;

    void validate(int train_size) const;
};

/// rows x cols = n with rows the largest divisor of n not above sqrt(n).
std::pair<int, int> default_som_grid(int n);

/// Online neural gas centres (m x n), initialised from distinct training samples.
Matrix train_neural_gas(const Matrix& samples, const ClusterConfig& cfg);

/// Online SOM centres (m x rows*cols) on a rectangular grid, row-major node order.
Matrix train_som(const Matrix& samples, const ClusterConfig& cfg);

/// Label of each centre by majority vote of its k nearest training samples.
/// Vote ties go to the lower class id; distance ties to the lower sample index.
std::vector<int> knn_vote_labels(const Matrix& centers, const Dataset& train, int k);

/// Mean Euclidean distance from each sample to its nearest centre.
double quantization_error(const Matrix& centers, const Matrix& samples);

Dictionary ngas_dictionary(const Dataset& train, const ClusterConfig& cfg);
Dictionary som_dictionary(const Dataset& train, const ClusterConfig& cfg);

}  // namespace adl
