#include "adl/dictionaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adl/errors.hpp"
#include "adl/random.hpp"

namespace adl {

namespace {

Dictionary from_samples(const Dataset& train, const std::vector<int>& indices, DictionaryMethod method,
                        std::uint64_t seed) {
    Dictionary d;
    d.atoms.resize(train.features.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        d.atoms.col(static_cast<Eigen::Index>(j)) = train.features.col(indices[j]);
        d.atom_labels.push_back(train.labels[static_cast<std::size_t>(indices[j])]);
        d.source_indices.push_back(indices[j]);
    }
    d.method = method;
    d.build_seed = seed;
    d.class_count = train.class_count;
    d.class_names = train.class_names;
    return d;
}

Dictionary from_centers(const Dataset& train, Matrix centers, int knn_k, DictionaryMethod method,
                        std::uint64_t seed) {
    Dictionary d;
    d.atom_labels = knn_vote_labels(centers, train, knn_k);
    d.atoms = std::move(centers);
    d.source_indices.assign(d.atom_labels.size(), kSyntheticSource);
    d.method = method;
    d.build_seed = seed;
    d.class_count = train.class_count;
    d.class_names = train.class_names;
    return d;
}

// Index of the nearest column of `centers` to `x` (ties: lower index).
Eigen::Index nearest(const Matrix& centers, const Eigen::Ref<const Vector>& x) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centers.cols(); ++k) {
        const double dist = (centers.col(k) - x).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best = k;
        }
    }
    return best;
}

Matrix initial_centers(const Matrix& samples, int n, Rng& rng) {
    const auto picks = rng.sample_without_replacement(static_cast<int>(samples.cols()), n);
    Matrix centers(samples.rows(), n);
    for (int k = 0; k < n; ++k) centers.col(k) = samples.col(picks[static_cast<std::size_t>(k)]);
    return centers;
}

}  // namespace

void AdlConfig::validate(int train_size) const {
    if (n < 1 || n > train_size) throw ConfigError("adl: atom count must lie in [1, N_train]");
    if (rounds < 1) throw ConfigError("adl: rounds must be >= 1");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("adl: eta must be finite and >= 0");
    lasso.validate();
}

AdlResult adl_learn(const Dataset& train, const AdlConfig& cfg) {
    cfg.validate(train.size());
    const int total_samples = train.size();
    const int rounds = cfg.rounds;

    ErrorLedger ledger;
    ledger.recon = Matrix::Zero(rounds, total_samples);
    ledger.classif = Matrix::Zero(rounds, total_samples);
    ledger.round_mean_recon = Vector::Zero(rounds);
    ledger.predicted.assign(static_cast<std::size_t>(rounds), std::vector<int>(static_cast<std::size_t>(total_samples), -1));

    for (int k = 0; k < rounds; ++k) {
        Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
        auto probe_indices = rng.sample_without_replacement(total_samples, cfg.n);
        const Dictionary probe = from_samples(train, probe_indices, DictionaryMethod::Random, cfg.seed);
        ledger.probe_dict_indices.push_back(std::move(probe_indices));

        const SrcClassifier classifier(probe, cfg.lasso);
        for (int i = 0; i < total_samples; ++i) {
            const Vector y = train.features.col(i);
            const SrcResult res = classifier.classify(y);
            if (!res.code.converged) ++ledger.nonconverged;
            ledger.recon(k, i) = reconstruction_error(y, probe.atoms, res.code.coeffs);
            ledger.predicted[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = res.label;
        }
        ledger.round_mean_recon(k) = ledger.recon.row(k).mean();
    }

    for (int i = 0; i < total_samples; ++i) {
        const double sample_mean = ledger.recon.col(i).mean();
        for (int k = 0; k < rounds; ++k) {
            if (ledger.predicted[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] ==
                train.labels[static_cast<std::size_t>(i)])
                continue;
            const double scale = cfg.normalization == ErrorNormalization::RoundMean ? ledger.round_mean_recon(k)
                                                                                     : sample_mean;
            ledger.classif(k, i) = cfg.eta * scale;
        }
    }

    ledger.total.resize(total_samples);
    for (int i = 0; i < total_samples; ++i) {
        double recon_sum = 0.0;
        double classif_sum = 0.0;
        for (int k = 0; k < rounds; ++k) {
            recon_sum += ledger.recon(k, i);
            classif_sum += ledger.classif(k, i);
        }
        ledger.total(i) = recon_sum + classif_sum;
    }

    std::vector<int> order(static_cast<std::size_t>(total_samples));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ledger.total(a) > ledger.total(b); });
    order.resize(static_cast<std::size_t>(cfg.n));
    ledger.selected = order;

    AdlResult out{from_samples(train, ledger.selected, DictionaryMethod::Adl, cfg.seed), std::move(ledger)};
    return out;
}

Dictionary wd_dictionary(const Dataset& train) {
    std::vector<int> all(static_cast<std::size_t>(train.size()));
    std::iota(all.begin(), all.end(), 0);
    return from_samples(train, all, DictionaryMethod::Wd, 0);
}

Dictionary random_dictionary(const Dataset& train, int n, std::uint64_t seed) {
    if (n < 1 || n > train.size()) throw ConfigError("random_dictionary: n must lie in [1, N_train]");
    Rng rng(seed);
    auto picks = rng.sample_without_replacement(train.size(), n);
    std::sort(picks.begin(), picks.end());
    return from_samples(train, picks, DictionaryMethod::Random, seed);
}

void ClusterConfig::validate(int train_size) const {
    if (n < 1 || n > train_size) throw ConfigError("cluster: centre count must lie in [1, N_train]");
    if (epochs < 1) throw ConfigError("cluster: epochs must be >= 1");
    if (knn_k < 1) throw ConfigError("cluster: knn_k must be >= 1");
    if (som_grid && (som_grid->first < 1 || som_grid->second < 1 || som_grid->first * som_grid->second != n))
        throw ConfigError("cluster: som_grid rows * cols must equal n");
    if (!(ng_step_initial > 0 && ng_step_final > 0 && ng_range_final > 0))
        throw ConfigError("cluster: neural gas schedule values must be positive");
    if (!(som_step_initial > 0 && som_step_final > 0 && som_radius_final > 0))
        throw ConfigError("cluster: SOM schedule values must be positive");
}

std::pair<int, int> default_som_grid(int n) {
    if (n < 1) throw ConfigError("default_som_grid: n must be >= 1");
    int rows = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (rows > 1 && n % rows != 0) --rows;
    return {rows, n / rows};
}

Matrix train_neural_gas(const Matrix& samples, const ClusterConfig& cfg) {
    const int total = static_cast<int>(samples.cols());
    cfg.validate(total);
    Rng rng(cfg.seed);
    Matrix centers = initial_centers(samples, cfg.n, rng);

    const double range_initial = cfg.ng_range_initial > 0 ? cfg.ng_range_initial : std::max(0.5 * cfg.n, cfg.ng_range_final);
    const double steps = static_cast<double>(cfg.epochs) * total;
    std::vector<int> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::pair<double, int>> ranked(static_cast<std::size_t>(cfg.n));

    std::size_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (int i : order) {
            const double frac = static_cast<double>(t++) / steps;
            const double step = cfg.ng_step_initial * std::pow(cfg.ng_step_final / cfg.ng_step_initial, frac);
            const double range = range_initial * std::pow(cfg.ng_range_final / range_initial, frac);
            const auto x = samples.col(i);
            for (int k = 0; k < cfg.n; ++k) ranked[static_cast<std::size_t>(k)] = {(centers.col(k) - x).squaredNorm(), k};
            std::sort(ranked.begin(), ranked.end());
            for (int r = 0; r < cfg.n; ++r) {
                const double h = step * std::exp(-static_cast<double>(r) / range);
                if (h < 1e-12) break;
                const int k = ranked[static_cast<std::size_t>(r)].second;
                centers.col(k) += h * (x - centers.col(k));
            }
        }
    }
    return centers;
}

Matrix train_som(const Matrix& samples, const ClusterConfig& cfg) {
    const int total = static_cast<int>(samples.cols());
    cfg.validate(total);
    const auto [rows, cols] = cfg.som_grid ? *cfg.som_grid : default_som_grid(cfg.n);
    Rng rng(cfg.seed);
    Matrix centers = initial_centers(samples, cfg.n, rng);

    const double radius_initial =
        cfg.som_radius_initial > 0 ? cfg.som_radius_initial : std::max(0.5 * std::max(rows, cols), cfg.som_radius_final);
    const double steps = static_cast<double>(cfg.epochs) * total;
    std::vector<int> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), 0);

    std::size_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (int i : order) {
            const double frac = static_cast<double>(t++) / steps;
            const double step = cfg.som_step_initial + (cfg.som_step_final - cfg.som_step_initial) * frac;
            const double radius = radius_initial + (cfg.som_radius_final - radius_initial) * frac;
            const auto x = samples.col(i);
            const auto bmu = static_cast<int>(nearest(centers, x));
            const int br = bmu / cols;
            const int bc = bmu % cols;
            for (int k = 0; k < cfg.n; ++k) {
                const double dr = k / cols - br;
                const double dc = k % cols - bc;
                const double h = step * std::exp(-(dr * dr + dc * dc) / (2.0 * radius * radius));
                if (h < 1e-12) continue;
                centers.col(k) += h * (x - centers.col(k));
            }
        }
    }
    return centers;
}

std::vector<int> knn_vote_labels(const Matrix& centers, const Dataset& train, int k) {
    if (k < 1) throw ConfigError("knn_vote_labels: k must be >= 1");
    if (centers.rows() != train.features.rows()) throw DimensionError("knn_vote_labels: dimension mismatch");
    const int total = train.size();
    const int kk = std::min(k, total);
    std::vector<int> labels;
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(total));
    std::vector<int> votes(static_cast<std::size_t>(train.class_count));
    for (Eigen::Index c = 0; c < centers.cols(); ++c) {
        for (int i = 0; i < total; ++i) dist[static_cast<std::size_t>(i)] = {(train.features.col(i) - centers.col(c)).squaredNorm(), i};
        std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
        std::fill(votes.begin(), votes.end(), 0);
        for (int r = 0; r < kk; ++r) ++votes[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(dist[static_cast<std::size_t>(r)].second)])];
        labels.push_back(static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin()));
    }
    return labels;
}

double quantization_error(const Matrix& centers, const Matrix& samples) {
    if (centers.rows() != samples.rows()) throw DimensionError("quantization_error: dimension mismatch");
    if (samples.cols() == 0) return 0.0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < samples.cols(); ++i)
        sum += (centers.col(nearest(centers, samples.col(i))) - samples.col(i)).norm();
    return sum / static_cast<double>(samples.cols());
}

Dictionary ngas_dictionary(const Dataset& train, const ClusterConfig& cfg) {
    return from_centers(train, train_neural_gas(train.features, cfg), cfg.knn_k, DictionaryMethod::Ngasd, cfg.seed);
}

Dictionary som_dictionary(const Dataset& train, const ClusterConfig& cfg) {
    return from_centers(train, train_som(train.features, cfg), cfg.knn_k, DictionaryMethod::Somd, cfg.seed);
}

}  // namespace adl
