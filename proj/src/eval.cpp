#include "adl/eval.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <set>

#include "adl/errors.hpp"
#include "adl/parallel.hpp"
#include "adl/random.hpp"

namespace adl {

namespace {

// Average ranks (1 = best) of `values`; `better(a, b)` says a ranks above b.
template <class Better>
std::vector<double> average_ranks(const std::vector<double>& values, Better better) {
    const std::size_t n = values.size();
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        int above = 0;
        int equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (better(values[j], values[i])) ++above;
            else if (values[j] == values[i]) ++equal;
        }
        ranks[i] = above + (equal + 1) / 2.0;
    }
    return ranks;
}

struct CellTask {
    int fold;
    DictionaryMethod method;
    /// Index into rates, or -1 for the rate-independent WD cell.
    int rate_index;
};

}  // namespace

void ExperimentConfig::validate() const {
    if (methods.empty()) throw ConfigError("experiment: no methods configured");
    if (size_rates.empty()) throw ConfigError("experiment: no size rates configured");
    for (std::size_t i = 0; i < size_rates.size(); ++i) {
        const double r = size_rates[i];
        if (!(r > 0.0 && r <= 1.0)) throw ConfigError("experiment: size rates must lie in (0, 1]");
        if (i > 0 && !(r > size_rates[i - 1])) throw ConfigError("experiment: size rates must be strictly increasing");
    }
    if (fold_count < 2) throw ConfigError("experiment: fold_count must be >= 2");
    if (adl.rounds < 1) throw ConfigError("experiment: adl rounds must be >= 1");
    if (!(adl.eta >= 0.0) || !std::isfinite(adl.eta)) throw ConfigError("experiment: adl eta must be finite and >= 0");
    ClusterConfig probe = cluster;
    probe.n = 1;
    probe.som_grid.reset();
    probe.validate(1);
    if (jobs < 1) throw ConfigError("experiment: jobs must be >= 1");
    if (pca_dim < 0) throw ConfigError("experiment: pca_dim must be >= 0");
    lasso.validate();
}

int dictionary_size(double rate, int train_size) {
    if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("dictionary size rate must lie in (0, 1]");
    const auto n = static_cast<int>(std::floor(rate * train_size + 0.5));
    return std::clamp(n, 1, std::max(train_size, 1));
}

std::uint64_t cell_seed(std::uint64_t master_seed, DictionaryMethod method, double rate, int fold) {
    std::uint64_t s = derive_seed(master_seed, hash_tag(to_string(method)));
    s = derive_seed(s, std::bit_cast<std::uint64_t>(rate));
    return derive_seed(s, static_cast<std::uint64_t>(fold));
}

std::uint64_t fold_seed(std::uint64_t master_seed) { return derive_seed(master_seed, hash_tag("folds")); }

FoldSplit prepare_fold(const Dataset& ds, const FoldPlan& plan, int fold, const ExperimentConfig& cfg) {
    if (fold < 0 || fold >= plan.fold_count) throw ConfigError("fold index out of range");
    const Dataset raw_train = ds.subset(plan.train_indices(fold));
    const Dataset raw_test = ds.subset(plan.test_indices(fold));
    auto [train, scaler] = standardize(raw_train);
    FoldSplit split{std::move(train), scaler.transform(raw_test), std::move(scaler), std::nullopt};
    if (cfg.pca_dim > 0) {
        split.pca = pca_fit(split.train, cfg.pca_dim);
        split.train = split.pca->project(split.train);
        split.test = split.pca->project(split.test);
    }
    return split;
}

Dictionary build_dictionary(const Dataset& train, DictionaryMethod method, int n, std::uint64_t seed,
                            const ExperimentConfig& cfg, ErrorLedger* ledger) {
    switch (method) {
        case DictionaryMethod::Wd: return wd_dictionary(train);
        case DictionaryMethod::Random: return random_dictionary(train, n, seed);
        case DictionaryMethod::Adl: {
            AdlConfig a = cfg.adl;
            a.n = n;
            a.seed = seed;
            a.lasso = cfg.lasso;
            AdlResult res = adl_learn(train, a);
            if (ledger) *ledger = std::move(res.ledger);
            return std::move(res.dictionary);
        }
        case DictionaryMethod::Somd:
        case DictionaryMethod::Ngasd: {
            ClusterConfig c = cfg.cluster;
            c.n = n;
            c.seed = seed;
            c.som_grid.reset();
            return method == DictionaryMethod::Somd ? som_dictionary(train, c) : ngas_dictionary(train, c);
        }
    }
    throw ConfigError("unknown dictionary method");
}

CellResult evaluate_dictionary(const Dictionary& dict, const Dataset& test, const LassoConfig& lasso) {
    if (test.dim() != dict.dim()) throw DimensionError("evaluate_dictionary: feature dimension mismatch");
    const SrcClassifier classifier(dict, lasso);
    CellResult cell;
    cell.dict_size = dict.size();
    cell.test_count = test.size();
    double recon_sum = 0.0;
    for (int i = 0; i < test.size(); ++i) {
        const Vector y = test.features.col(i);
        const SrcResult res = classifier.classify(y);
        if (res.label == test.labels[static_cast<std::size_t>(i)]) ++cell.correct;
        if (!res.code.converged) ++cell.nonconverged;
        if (res.residuals.degenerate) ++cell.degenerate;
        recon_sum += reconstruction_error(y, dict.atoms, res.code.coeffs);
    }
    if (cell.test_count > 0) {
        cell.accuracy = static_cast<double>(cell.correct) / cell.test_count;
        cell.mean_recon_error = recon_sum / cell.test_count;
    }
    return cell;
}

int EvaluationReport::failed_cells() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](const auto& kv) { return kv.second.failed; }));
}

int EvaluationReport::nonconverged_codings() const {
    int total = 0;
    for (const auto& [key, cell] : cells) total += cell.nonconverged;
    return total;
}

void summarize(EvaluationReport& report) {
    report.aggregates.clear();
    report.dataset_accuracy.clear();
    report.dataset_recon_error.clear();
    report.ranks.clear();
    report.mean_ranks.clear();

    for (const auto& ds : report.datasets) {
        for (double rate : report.rates) {
            for (DictionaryMethod m : report.methods) {
                double acc = 0.0;
                double rec = 0.0;
                int count = 0;
                for (int f = 0; f < report.fold_count; ++f) {
                    auto it = report.cells.find(CellKey{ds, m, rate, f});
                    if (it == report.cells.end() || it->second.failed) continue;
                    acc += it->second.accuracy;
                    rec += it->second.mean_recon_error;
                    ++count;
                }
                if (count == 0) continue;
                report.dataset_accuracy[{ds, MethodRate{m, rate}}] = acc / count;
                report.dataset_recon_error[{ds, MethodRate{m, rate}}] = rec / count;
            }
        }
    }

    for (DictionaryMethod m : report.methods) {
        for (double rate : report.rates) {
            double sum = 0.0;
            int count = 0;
            for (const auto& ds : report.datasets) {
                auto it = report.dataset_accuracy.find({ds, MethodRate{m, rate}});
                if (it == report.dataset_accuracy.end()) continue;
                sum += it->second;
                ++count;
            }
            if (count > 0) report.aggregates[MethodRate{m, rate}] = sum / count;
        }
    }

    std::vector<DictionaryMethod> ranked;
    for (DictionaryMethod m : report.rank_methods)
        if (std::find(report.methods.begin(), report.methods.end(), m) != report.methods.end()) ranked.push_back(m);

    std::map<MethodRate, std::pair<MethodRank, int>> sums;
    for (const auto& ds : report.datasets) {
        for (double rate : report.rates) {
            std::vector<DictionaryMethod> present;
            std::vector<double> acc;
            std::vector<double> rec;
            for (DictionaryMethod m : ranked) {
                auto a = report.dataset_accuracy.find({ds, MethodRate{m, rate}});
                if (a == report.dataset_accuracy.end()) continue;
                present.push_back(m);
                acc.push_back(a->second);
                rec.push_back(report.dataset_recon_error.at({ds, MethodRate{m, rate}}));
            }
            if (present.empty()) continue;
            const auto acc_rank = average_ranks(acc, [](double x, double y) { return x > y; });
            const auto rec_rank = average_ranks(rec, [](double x, double y) { return x < y; });
            auto& row = report.ranks[DatasetRate{ds, rate}];
            for (std::size_t i = 0; i < present.size(); ++i) {
                row.push_back(MethodRank{present[i], acc_rank[i], rec_rank[i]});
                auto& [sum, count] = sums[MethodRate{present[i], rate}];
                sum.method = present[i];
                sum.accuracy_rank += acc_rank[i];
                sum.recon_rank += rec_rank[i];
                ++count;
            }
        }
    }
    for (auto& [key, value] : sums) {
        MethodRank r = value.first;
        r.accuracy_rank /= value.second;
        r.recon_rank /= value.second;
        report.mean_ranks[key] = r;
    }
}

EvaluationReport run_experiment(const Dataset& ds, const ExperimentConfig& cfg, const std::string& dataset_id) {
    cfg.validate();
    ds.validate();
    const FoldPlan plan = make_folds(ds, cfg.fold_count, fold_seed(cfg.master_seed));

    std::vector<FoldSplit> folds;
    for (int f = 0; f < cfg.fold_count; ++f) folds.push_back(prepare_fold(ds, plan, f, cfg));

    std::vector<CellTask> tasks;
    for (int f = 0; f < cfg.fold_count; ++f) {
        for (DictionaryMethod m : cfg.methods) {
            if (m == DictionaryMethod::Wd) {
                tasks.push_back(CellTask{f, m, -1});
                continue;
            }
            for (int r = 0; r < static_cast<int>(cfg.size_rates.size()); ++r) tasks.push_back(CellTask{f, m, r});
        }
    }

    std::vector<CellResult> results(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t t) {
        const CellTask& task = tasks[t];
        const auto start = std::chrono::steady_clock::now();
        CellResult cell;
        try {
            const FoldSplit& fd = folds[static_cast<std::size_t>(task.fold)];
            const int train_size = fd.train.size();
            const double rate = task.rate_index < 0 ? 1.0 : cfg.size_rates[static_cast<std::size_t>(task.rate_index)];
            const int n = dictionary_size(rate, train_size);
            ErrorLedger ledger;
            const Dictionary dict =
                build_dictionary(fd.train, task.method, n, cell_seed(cfg.master_seed, task.method, rate, task.fold), cfg, &ledger);
            cell = evaluate_dictionary(dict, fd.test, cfg.lasso);
            if (task.method == DictionaryMethod::Adl) cell.nonconverged += ledger.nonconverged;
        } catch (const std::exception& e) {
            cell = CellResult{};
            cell.failed = true;
            cell.error = e.what();
        }
        cell.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results[t] = cell;
    });

    EvaluationReport report;
    report.datasets = {dataset_id};
    report.methods = cfg.methods;
    report.rates = cfg.size_rates;
    report.fold_count = cfg.fold_count;
    report.rank_methods = cfg.rank_methods;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const CellTask& task = tasks[t];
        if (task.rate_index < 0) {
            for (double rate : cfg.size_rates) report.cells[CellKey{dataset_id, task.method, rate, task.fold}] = results[t];
        } else {
            report.cells[CellKey{dataset_id, task.method, cfg.size_rates[static_cast<std::size_t>(task.rate_index)], task.fold}] =
                results[t];
        }
    }
    summarize(report);
    return report;
}

EvaluationReport aggregate_report(const std::vector<EvaluationReport>& reports) {
    if (reports.empty()) throw ConfigError("aggregate_report: no reports");
    EvaluationReport out;
    out.methods = reports.front().methods;
    out.rates = reports.front().rates;
    out.fold_count = reports.front().fold_count;
    out.rank_methods = reports.front().rank_methods;
    std::set<std::string> seen;
    for (const auto& r : reports) {
        if (r.methods != out.methods || r.rates != out.rates || r.fold_count != out.fold_count)
            throw ConfigError("aggregate_report: reports use different method/rate/fold grids");
        for (const auto& ds : r.datasets) {
            if (!seen.insert(ds).second) throw ConfigError("aggregate_report: dataset '" + ds + "' appears twice");
            out.datasets.push_back(ds);
        }
        out.cells.insert(r.cells.begin(), r.cells.end());
    }
    summarize(out);
    return out;
}

PairedSummary compare_methods(const EvaluationReport& report, DictionaryMethod a, DictionaryMethod b, double rate) {
    PairedSummary out{a, b, rate, {}, 0.0, 0, 0, 0};
    for (const auto& ds : report.datasets) {
        for (int f = 0; f < report.fold_count; ++f) {
            auto ca = report.cells.find(CellKey{ds, a, rate, f});
            auto cb = report.cells.find(CellKey{ds, b, rate, f});
            if (ca == report.cells.end() || cb == report.cells.end() || ca->second.failed || cb->second.failed)
                throw MissingCellError("compare_methods: no usable cell for " + ds + " fold " + std::to_string(f));
            PairedEntry e{ds, f, ca->second.accuracy, cb->second.accuracy, ca->second.accuracy - cb->second.accuracy};
            if (e.difference > 0) ++out.wins;
            else if (e.difference < 0) ++out.losses;
            else ++out.ties;
            out.mean_difference += e.difference;
            out.entries.push_back(std::move(e));
        }
    }
    if (out.entries.empty()) throw MissingCellError("compare_methods: report has no cells");
    out.mean_difference /= static_cast<double>(out.entries.size());
    return out;
}

}  // namespace adl
