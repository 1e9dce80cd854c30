// Acceptance checks. Prints one PASS/FAIL line per criterion, followed by
// indented detail lines, and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "adl/data.hpp"
#include "adl/dictionaries.hpp"
#include "adl/eval.hpp"
#include "adl/format.hpp"
#include "adl/io.hpp"
#include "adl/lasso.hpp"
#include "adl/random.hpp"
#include "adl/src.hpp"
#include "cli/commands.hpp"
#include "oracles.hpp"

using namespace adl;
namespace at = adl::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::vector<std::string> details;
    void note(const std::string& line) { details.push_back(line); }
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string pct(double v) { return format_fixed(100.0 * v, 2); }

int worker_count() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Dictionary one_atom_per_class(const Matrix& atoms) {
    Dictionary d;
    d.atoms = atoms;
    d.class_count = static_cast<int>(atoms.cols());
    for (int j = 0; j < d.class_count; ++j) {
        d.atom_labels.push_back(j);
        d.source_indices.push_back(j);
    }
    d.method = DictionaryMethod::Random;
    return d;
}

// Lasso objective equals the exhaustive sign-pattern minimum.
Verdict lasso_oracle() {
    Verdict v;
    const auto start = Clock::now();
    Rng rng(2024);
    const double lambdas[] = {0.01, 0.1, 1.0};
    int mismatched = 0;
    int uncertified = 0;
    int nonconverged = 0;
    double worst_gap = 0.0;
    double worst_kkt = 0.0;
    const int instances = 200;
    for (int t = 0; t < instances; ++t) {
        const int m = 1 + static_cast<int>(rng.below(6));
        const int n = 1 + static_cast<int>(rng.below(8));
        const double lambda = lambdas[t % 3];
        const Matrix d = at::normal_matrix(m, n, rng.next());
        const Vector y = at::normal_matrix(m, 1, rng.next()).col(0);
        const SparseCode code = solve_lasso(y, d, {.lambda = lambda});
        const auto oracle = at::lasso_sign_pattern_oracle(y, d, lambda);
        const double gap = std::abs(code.objective - oracle.objective);
        worst_gap = std::max(worst_gap, gap);
        if (gap > 1e-6) ++mismatched;
        if (code.converged) {
            const double kkt = at::kkt_violation_loops(y, d, code.coeffs, lambda);
            worst_kkt = std::max(worst_kkt, kkt);
            if (kkt > 1e-6) ++uncertified;
        } else {
            ++nonconverged;
        }
    }
    const double elapsed = seconds_since(start);
    v.pass = mismatched == 0 && uncertified == 0 && elapsed < 10.0;
    v.note(std::to_string(instances) + " instances, m<=6, n<=8, lambda in {0.01, 0.1, 1}");
    v.note("objective mismatches > 1e-6: " + std::to_string(mismatched) + " (worst gap " + format_double(worst_gap) + ")");
    v.note("converged codes with KKT > 1e-6: " + std::to_string(uncertified) + " (worst " + format_double(worst_kkt) +
           "), non-converged: " + std::to_string(nonconverged));
    v.note("runtime " + format_fixed(elapsed, 2) + " s (limit 10 s)");
    return v;
}

// Orthonormal one-atom-per-class dictionaries classify their own atoms.
Verdict exact_atom_recovery() {
    Verdict v;
    int total = 0;
    int correct = 0;
    for (int classes = 2; classes <= 12; ++classes) {
        for (int extra : {0, 3, 10}) {
            const int m = classes + extra;
            const Matrix q = at::normal_matrix(m, m, static_cast<std::uint64_t>(100 * classes + extra)).householderQr().householderQ();
            const Dictionary d = one_atom_per_class(q.leftCols(classes));
            const SrcClassifier clf(d, {.lambda = 0.01});
            for (int c = 0; c < classes; ++c) {
                ++total;
                if (clf.classify(d.atoms.col(c)).label == c) ++correct;
            }
        }
    }
    v.pass = correct == total;
    v.note("lambda 0.01; 2..12 classes, dimension = classes + {0, 3, 10}");
    v.note("recovered " + std::to_string(correct) + " / " + std::to_string(total) + " atoms");
    return v;
}

// ADL with n = N returns exactly the WD atom set.
Verdict degenerate_identity() {
    Verdict v;
    int runs = 0;
    int identical = 0;
    const std::vector<Dataset> sets{at::gaussian_blobs(3, 2, 10, 1.0, 1), at::gaussian_blobs(6, 4, 6, 2.0, 2),
                                    at::gaussian_blobs(10, 3, 9, 0.5, 3)};
    for (const Dataset& raw : sets) {
        const Dataset ds = standardize(raw).first;
        const Dictionary wd = wd_dictionary(ds);
        const std::set<long long> wd_set(wd.source_indices.begin(), wd.source_indices.end());
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            AdlConfig cfg;
            cfg.n = ds.size();
            cfg.seed = seed;
            const Dictionary d = adl_learn(ds, cfg).dictionary;
            const std::set<long long> got(d.source_indices.begin(), d.source_indices.end());
            bool same = got == wd_set && d.size() == wd.size();
            for (int j = 0; same && j < d.size(); ++j)
                same = d.atoms.col(j) == ds.features.col(static_cast<int>(d.source_indices[static_cast<std::size_t>(j)]));
            ++runs;
            if (same) ++identical;
        }
    }
    v.pass = identical == runs;
    v.note("3 synthetic datasets x 20 seeds; identical atom sets: " + std::to_string(identical) + " / " + std::to_string(runs));
    return v;
}

// Ledger totals of a six-sample, one-round run match an independent trace.
Verdict ledger_arithmetic() {
    Verdict v;
    Dataset ds;
    ds.features.resize(2, 6);
    ds.features << 1.0, 0.9, 0.2, -0.8, -1.1, 0.1,  //
        0.1, 0.3, 1.0, -0.2, 0.4, -1.2;
    ds.labels = {0, 0, 1, 1, 0, 1};
    ds.class_count = 2;
    AdlConfig cfg;
    cfg.n = 2;
    cfg.rounds = 1;
    cfg.eta = 5.0;
    cfg.seed = 82;
    cfg.lasso.lambda = 0.1;
    const AdlResult r = adl_learn(ds, cfg);
    const auto& probe = r.ledger.probe_dict_indices.at(0);

    Dictionary pd;
    pd.atoms.resize(2, static_cast<Eigen::Index>(probe.size()));
    for (std::size_t j = 0; j < probe.size(); ++j) {
        pd.atoms.col(static_cast<Eigen::Index>(j)) = ds.features.col(probe[j]);
        pd.atom_labels.push_back(ds.labels[static_cast<std::size_t>(probe[j])]);
    }
    pd.class_count = 2;
    std::vector<double> recon(6);
    std::vector<bool> wrong(6);
    for (int i = 0; i < 6; ++i) {
        const Vector y = ds.features.col(i);
        const auto sol = at::lasso_sign_pattern_oracle(y, pd.atoms, cfg.lasso.lambda);
        recon[static_cast<std::size_t>(i)] = (y - pd.atoms * sol.x).norm();
        const auto res = at::class_residuals_loops(y, pd, sol.x);
        wrong[static_cast<std::size_t>(i)] = (res[1] < res[0] ? 1 : 0) != ds.labels[static_cast<std::size_t>(i)];
    }
    const double mean = std::accumulate(recon.begin(), recon.end(), 0.0) / 6.0;
    double worst_total = 0.0;
    bool classif_exact = true;
    bool identity_exact = true;
    int misclassified = 0;
    for (int i = 0; i < 6; ++i) {
        const double independent = recon[static_cast<std::size_t>(i)] + (wrong[static_cast<std::size_t>(i)] ? cfg.eta * mean : 0.0);
        worst_total = std::max(worst_total, std::abs(independent - r.ledger.total(i)));
        const bool ledger_wrong = r.ledger.predicted[0][static_cast<std::size_t>(i)] != ds.labels[static_cast<std::size_t>(i)];
        if (ledger_wrong != wrong[static_cast<std::size_t>(i)]) classif_exact = false;
        if (ledger_wrong) ++misclassified;
        const double expected = ledger_wrong ? cfg.eta * r.ledger.round_mean_recon(0) : 0.0;
        if (r.ledger.classif(0, i) != expected) classif_exact = false;
        if (r.ledger.total(i) != r.ledger.recon(0, i) + r.ledger.classif(0, i)) identity_exact = false;
    }
    std::vector<int> order(6);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return r.ledger.total(a) > r.ledger.total(b); });
    const bool top_n = r.ledger.selected == std::vector<int>{order[0], order[1]};
    v.pass = worst_total <= 1e-6 && classif_exact && identity_exact && top_n;
    v.note("N=6, K=1, n=2, eta=5, probe {" + std::to_string(probe[0]) + ", " + std::to_string(probe[1]) + "}, " +
           std::to_string(misclassified) + " misclassified");
    v.note("max |E(ledger) - E(independent oracle trace)| = " + format_double(worst_total) + " (tolerance 1e-6)");
    v.note(std::string("classification entries equal eta * round mean exactly: ") + (classif_exact ? "yes" : "no"));
    v.note(std::string("total equals recon + classif exactly: ") + (identity_exact ? "yes" : "no"));
    v.note(std::string("selected atoms are the two largest totals: ") + (top_n ? "yes" : "no"));
    return v;
}

struct UciSet {
    std::string id;
    std::string file;
};

// ADL vs RANDOM over five master seeds on three UCI sets.
Verdict protocol_shape() {
    Verdict v;
    const auto start = Clock::now();
    const std::vector<UciSet> sets{{"wine", "wine.csv"}, {"glass", "glass.csv"}, {"libras", "libras.csv"}};
    const std::vector<double> rates{0.1, 0.2, 0.3, 0.4, 0.5};
    const int seeds = 5;
    int datasets_a = 0;
    int datasets_b = 0;
    int datasets_b_avg = 0;
    for (const auto& set : sets) {
        const Dataset ds = load_csv(std::filesystem::path(ADL_DATA_DIR) / set.file, {.label_column = "class"});
        int rising = 0;
        std::map<MethodRate, double> mean;
        for (int s = 1; s <= seeds; ++s) {
            ExperimentConfig cfg;
            cfg.methods = {DictionaryMethod::Adl, DictionaryMethod::Random};
            cfg.rank_methods = cfg.methods;
            cfg.size_rates = rates;
            cfg.master_seed = static_cast<std::uint64_t>(s);
            cfg.jobs = worker_count();
            const EvaluationReport r = run_experiment(ds, cfg, set.id);
            const double lo = r.aggregates.at({DictionaryMethod::Adl, 0.1});
            const double hi = r.aggregates.at({DictionaryMethod::Adl, 0.5});
            if (hi > lo) ++rising;
            for (const auto& [key, acc] : r.aggregates) mean[key] += acc / seeds;
        }
        bool every_rate = true;
        double adl_avg = 0.0;
        double rnd_avg = 0.0;
        std::string row;
        for (double rate : {0.3, 0.4, 0.5}) {
            const double a = mean.at({DictionaryMethod::Adl, rate});
            const double b = mean.at({DictionaryMethod::Random, rate});
            if (a < b) every_rate = false;
            adl_avg += a / 3;
            rnd_avg += b / 3;
            row += " " + format_double(rate) + ": " + pct(a) + " vs " + pct(b) + ";";
        }
        if (rising >= 4) ++datasets_a;
        if (every_rate) ++datasets_b;
        if (adl_avg >= rnd_avg) ++datasets_b_avg;
        std::string curve;
        for (double rate : rates) curve += " " + pct(mean.at({DictionaryMethod::Adl, rate}));
        v.note(set.id + ": ADL@0.5 > ADL@0.1 in " + std::to_string(rising) + "/5 seeds; ADL curve [%]:" + curve);
        v.note(set.id + ": ADL vs RANDOM [%]," + row + " mean " + pct(adl_avg) + " vs " + pct(rnd_avg));
    }
    const double elapsed = seconds_since(start);
    const bool a_ok = datasets_a == static_cast<int>(sets.size());
    const bool b_ok = datasets_b >= 2;
    v.pass = a_ok && b_ok && elapsed < 300.0;
    v.note("(a) datasets with ADL@0.5 > ADL@0.1 in >= 4/5 seeds: " + std::to_string(datasets_a) + "/3 -> " +
           (a_ok ? "met" : "not met"));
    v.note("(b) datasets with ADL >= RANDOM at every rate >= 0.3: " + std::to_string(datasets_b) + "/3 -> " +
           (b_ok ? "met" : "not met") + " (averaged over those rates: " + std::to_string(datasets_b_avg) + "/3)");
    v.note("runtime " + format_fixed(elapsed, 1) + " s (limit 300 s), " +
           std::to_string(worker_count()) + " worker(s)");
    return v;
}

// RANDOM at rate 1.0 reproduces WD cells.
Verdict wd_consistency() {
    Verdict v;
    int cells = 0;
    int identical = 0;
    for (const char* file : {"wine.csv", "glass.csv"}) {
        const Dataset ds = load_csv(std::filesystem::path(ADL_DATA_DIR) / file, {.label_column = "class"});
        ExperimentConfig cfg;
        cfg.methods = {DictionaryMethod::Wd, DictionaryMethod::Random};
        cfg.rank_methods = cfg.methods;
        cfg.size_rates = {1.0};
        cfg.master_seed = 11;
        const EvaluationReport r = run_experiment(ds, cfg, file);
        for (int f = 0; f < cfg.fold_count; ++f) {
            const CellResult& a = r.cells.at(CellKey{file, DictionaryMethod::Wd, 1.0, f});
            const CellResult& b = r.cells.at(CellKey{file, DictionaryMethod::Random, 1.0, f});
            ++cells;
            if (a.dict_size == b.dict_size && a.correct == b.correct && a.accuracy == b.accuracy &&
                a.mean_recon_error == b.mean_recon_error && a.degenerate == b.degenerate)
                ++identical;
        }
    }
    v.pass = identical == cells;
    v.note("wine and glass, 5 folds each, lambda 0.1: identical cells " + std::to_string(identical) + " / " + std::to_string(cells));
    return v;
}

// Full evaluate runs are byte-identical, serial and parallel.
Verdict determinism() {
    Verdict v;
    at::TempDir dir("acceptance");
    Dataset blobs = at::gaussian_blobs(6, 4, 15, 2.0, 5);
    write_csv(blobs, dir / "blobs.csv", "label");
    at::write_file(dir / "manifest.json",
                   std::string(R"({"datasets": [{"id": "wine", "path": ")") + ADL_DATA_DIR +
                       R"(/wine.csv", "label_column": "class"}, {"id": "blobs", "path": "blobs.csv", "label_column": "label"}],)"
                       R"( "experiment": {"master_seed": 42}})");
    const std::vector<std::pair<std::string, int>> runs{{"serial1", 1}, {"serial2", 1}, {"parallel1", 4}, {"parallel2", 4}};
    for (const auto& [name, jobs] : runs)
        cli::evaluate({.manifest = dir / "manifest.json", .out_dir = dir / name, .jobs = jobs});
    const std::vector<std::string> files{"cells.csv", "mean_accuracy.csv", "mean_accuracy.md", "summary.json",
                                         "charts/wine.svg", "charts/blobs.svg"};
    int compared = 0;
    int differing = 0;
    for (const auto& file : files) {
        const std::string ref = at::read_file(dir / "serial1" / file);
        for (std::size_t k = 1; k < runs.size(); ++k) {
            ++compared;
            if (at::read_file(dir / runs[k].first / file) != ref) {
                ++differing;
                v.note("differs: " + runs[k].first + "/" + file);
            }
        }
    }
    v.pass = differing == 0;
    v.note("2 serial + 2 parallel (4 jobs) runs over wine and a synthetic set; " + std::to_string(compared) +
           " file comparisons, " + std::to_string(differing) + " differing");
    return v;
}

// Synthetic "faces": each class lives near its own low-dimensional subspace.
Dataset subspace_classes(std::uint64_t seed) {
    const int dim = 64;
    const int classes = 4;
    const int per_class = 50;
    const int rank = 4;
    const Matrix shared = at::normal_matrix(dim, 1, seed);
    Dataset ds;
    ds.features.resize(dim, classes * per_class);
    ds.class_count = classes;
    for (int c = 0; c < classes; ++c) ds.class_names.push_back("person" + std::to_string(c));
    std::vector<Matrix> bases;
    std::vector<Vector> means;
    for (int c = 0; c < classes; ++c) {
        bases.push_back(at::normal_matrix(dim, rank, seed * 31 + static_cast<std::uint64_t>(c) + 1));
        means.push_back(shared.col(0) + 0.6 * at::normal_matrix(dim, 1, seed * 37 + static_cast<std::uint64_t>(c) + 7).col(0));
    }
    const Matrix coeffs = at::normal_matrix(rank, classes * per_class, seed * 41 + 3);
    const Matrix noise = at::normal_matrix(dim, classes * per_class, seed * 43 + 5);
    for (int i = 0; i < classes * per_class; ++i) {
        const int c = i % classes;
        ds.features.col(i) = means[static_cast<std::size_t>(c)] + bases[static_cast<std::size_t>(c)] * coeffs.col(i) + 0.8 * noise.col(i);
        ds.labels.push_back(c);
    }
    return ds;
}

// PCA to 10 dimensions, then ADL + SRC against a random dictionary.
Verdict eigenface_pipeline() {
    Verdict v;
    int wins = 0;
    std::string rows;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const Dataset ds = subspace_classes(s);
        ExperimentConfig cfg;
        cfg.methods = {DictionaryMethod::Adl, DictionaryMethod::Random};
        cfg.rank_methods = cfg.methods;
        cfg.size_rates = {0.5};
        cfg.pca_dim = 10;
        cfg.master_seed = s;
        cfg.jobs = worker_count();
        const EvaluationReport r = run_experiment(ds, cfg, "synthetic");
        const double a = r.aggregates.at({DictionaryMethod::Adl, 0.5});
        const double b = r.aggregates.at({DictionaryMethod::Random, 0.5});
        if (r.failed_cells() == 0 && a >= b) ++wins;
        rows += " seed " + std::to_string(s) + ": " + pct(a) + " vs " + pct(b) + ";";
    }
    v.pass = wins >= 4;
    v.note("64-dim, 200 samples, 4 classes, PCA d=10, rate 0.5; ADL vs RANDOM [%]:" + rows);
    v.note("seeds with ADL >= RANDOM: " + std::to_string(wins) + "/5 (need 4)");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"lasso oracle equivalence", lasso_oracle},
        {"SRC exact-atom recovery", exact_atom_recovery},
        {"ADL degenerate identity", degenerate_identity},
        {"ledger arithmetic", ledger_arithmetic},
        {"protocol-shape reproduction on UCI data", protocol_shape},
        {"WD reference consistency", wd_consistency},
        {"determinism of evaluate", determinism},
        {"eigenface pipeline property", eigenface_pipeline},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.note(std::string("exception: ") + e.what());
        }
        if (!v.pass) ++failures;
        std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << ": " << criteria[k].first << '\n';
        for (const auto& line : v.details) std::cout << "    " << line << '\n';
        std::cout.flush();
    }
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
