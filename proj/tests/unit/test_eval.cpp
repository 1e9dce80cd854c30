#include <doctest.h>

#include <cmath>
#include <set>

#include "adl/errors.hpp"
#include "adl/eval.hpp"
#include "adl/io.hpp"
#include "oracles.hpp"

using namespace adl;
using adl::testing::gaussian_blobs;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.size_rates = {0.2, 0.5};
    cfg.fold_count = 3;
    cfg.cluster.epochs = 5;
    cfg.adl.rounds = 2;
    cfg.master_seed = 5;
    return cfg;
}

CellResult cell(double accuracy, double recon) {
    CellResult c;
    c.test_count = 10;
    c.correct = static_cast<int>(std::lround(accuracy * 10));
    c.accuracy = accuracy;
    c.mean_recon_error = recon;
    c.dict_size = 3;
    return c;
}

EvaluationReport synthetic_report(const std::string& name, double adl_acc, double random_acc) {
    EvaluationReport r;
    r.datasets = {name};
    r.methods = {DictionaryMethod::Adl, DictionaryMethod::Random};
    r.rates = {0.5};
    r.fold_count = 2;
    r.rank_methods = {DictionaryMethod::Adl, DictionaryMethod::Random};
    for (int f = 0; f < 2; ++f) {
        r.cells[CellKey{name, DictionaryMethod::Adl, 0.5, f}] = cell(adl_acc, 1.0);
        r.cells[CellKey{name, DictionaryMethod::Random, 0.5, f}] = cell(random_acc, 2.0);
    }
    summarize(r);
    return r;
}

}  // namespace

TEST_CASE("dictionary size rounds half up and clamps") {
    CHECK(dictionary_size(0.5, 142) == 71);
    CHECK(dictionary_size(0.1, 142) == 14);
    CHECK(dictionary_size(0.25, 10) == 3);
    CHECK(dictionary_size(0.01, 10) == 1);
    CHECK(dictionary_size(1.0, 143) == 143);
    CHECK_THROWS_AS(dictionary_size(0.0, 10), ConfigError);
    CHECK_THROWS_AS(dictionary_size(1.5, 10), ConfigError);
}

TEST_CASE("cell seeds are distinct across the grid") {
    std::set<std::uint64_t> seeds;
    for (auto m : {DictionaryMethod::Adl, DictionaryMethod::Random, DictionaryMethod::Somd, DictionaryMethod::Ngasd})
        for (double r : {0.1, 0.2, 0.3})
            for (int f = 0; f < 5; ++f) seeds.insert(cell_seed(1, m, r, f));
    CHECK(seeds.size() == 4 * 3 * 5);
    CHECK(cell_seed(1, DictionaryMethod::Adl, 0.1, 0) != cell_seed(2, DictionaryMethod::Adl, 0.1, 0));
    CHECK(fold_seed(1) != fold_seed(2));
}

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.size_rates = {0.3, 0.2};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.size_rates = {0.0, 0.2};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.size_rates = {0.5, 1.2};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.methods.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("folds are standardized with training statistics only") {
    const Dataset ds = gaussian_blobs(3, 3, 10, 2.0, 1);
    const FoldPlan plan = make_folds(ds, 3, 2);
    ExperimentConfig cfg = small_config();
    const FoldSplit split = prepare_fold(ds, plan, 1, cfg);
    for (int r = 0; r < 3; ++r) CHECK(std::abs(split.train.features.row(r).mean()) < 1e-12);
    const Scaler s = fit_scaler(ds.subset(plan.train_indices(1)));
    CHECK((split.scaler.mean - s.mean).norm() < 1e-12);
    CHECK((split.test.features - s.transform(ds.subset(plan.test_indices(1)).features)).norm() < 1e-12);
    CHECK(!split.pca);
    cfg.pca_dim = 2;
    const FoldSplit projected = prepare_fold(ds, plan, 1, cfg);
    REQUIRE(projected.pca);
    CHECK(projected.train.dim() == 2);
    CHECK(projected.test.dim() == 2);
}

TEST_CASE("WD represents seen test vectors exactly at tiny lambda") {
    Dataset train = gaussian_blobs(3, 2, 6, 2.0, 3);
    Dataset test = train.subset({0, 3, 5});
    CellResult c = evaluate_dictionary(wd_dictionary(train), test, {.lambda = 1e-8});
    CHECK(c.mean_recon_error < 1e-3);
    CHECK(c.accuracy == static_cast<double>(c.correct) / c.test_count);
}

TEST_CASE("run_experiment: cell grid, sizes, determinism and WD duplication") {
    const Dataset ds = gaussian_blobs(4, 3, 12, 2.0, 4);
    const ExperimentConfig cfg = small_config();
    const EvaluationReport a = run_experiment(ds, cfg, "blobs");
    CHECK(a.cells.size() == cfg.methods.size() * cfg.size_rates.size() * 3);
    CHECK(a.failed_cells() == 0);
    const FoldPlan plan = make_folds(ds, 3, fold_seed(cfg.master_seed));
    for (const auto& [key, c] : a.cells) {
        CHECK(c.accuracy >= 0.0);
        CHECK(c.accuracy <= 1.0);
        CHECK(c.accuracy == static_cast<double>(c.correct) / c.test_count);
        const int train_n = static_cast<int>(plan.train_indices(key.fold).size());
        CHECK(c.dict_size == (key.method == DictionaryMethod::Wd ? train_n : dictionary_size(key.rate, train_n)));
        CHECK(c.test_count == static_cast<int>(plan.test_indices(key.fold).size()));
    }
    for (int f = 0; f < 3; ++f) {
        const auto& lo = a.cells.at(CellKey{"blobs", DictionaryMethod::Wd, 0.2, f});
        const auto& hi = a.cells.at(CellKey{"blobs", DictionaryMethod::Wd, 0.5, f});
        CHECK(lo.accuracy == hi.accuracy);
        CHECK(lo.mean_recon_error == hi.mean_recon_error);
    }
    const EvaluationReport b = run_experiment(ds, cfg, "blobs");
    CHECK(report_csv(a) == report_csv(b));
}

TEST_CASE("parallel execution matches serial execution exactly") {
    const Dataset ds = gaussian_blobs(4, 3, 12, 2.0, 5);
    ExperimentConfig cfg = small_config();
    const std::string serial = report_csv(run_experiment(ds, cfg, "p"));
    cfg.jobs = 4;
    CHECK(report_csv(run_experiment(ds, cfg, "p")) == serial);
}

TEST_CASE("RANDOM at rate 1.0 reproduces WD cells") {
    const Dataset ds = gaussian_blobs(3, 3, 10, 1.5, 6);
    ExperimentConfig cfg = small_config();
    cfg.methods = {DictionaryMethod::Wd, DictionaryMethod::Random};
    cfg.size_rates = {1.0};
    const EvaluationReport r = run_experiment(ds, cfg, "x");
    for (int f = 0; f < 3; ++f) {
        const auto& wd = r.cells.at(CellKey{"x", DictionaryMethod::Wd, 1.0, f});
        const auto& rnd = r.cells.at(CellKey{"x", DictionaryMethod::Random, 1.0, f});
        CHECK(wd.correct == rnd.correct);
        CHECK(wd.accuracy == rnd.accuracy);
        CHECK(wd.mean_recon_error == rnd.mean_recon_error);
        CHECK(wd.dict_size == rnd.dict_size);
    }
}

TEST_CASE("aggregates recompute from cells") {
    const Dataset ds = gaussian_blobs(3, 3, 10, 1.5, 7);
    const EvaluationReport r = run_experiment(ds, small_config(), "d");
    for (const auto& [key, value] : r.aggregates) {
        double sum = 0.0;
        for (int f = 0; f < r.fold_count; ++f) sum += r.cells.at(CellKey{"d", key.method, key.rate, f}).accuracy;
        CHECK(std::abs(value - sum / r.fold_count) <= 1e-12);
    }
    const EvaluationReport single = aggregate_report({r});
    CHECK(single.aggregates == r.aggregates);
    CHECK(report_csv(single) == report_csv(r));
}

TEST_CASE("aggregation arithmetic over hand-built reports") {
    const auto a = synthetic_report("a", 0.6, 0.5);
    const auto b = synthetic_report("b", 0.8, 0.9);
    const auto c = synthetic_report("c", 0.4, 0.1);
    const EvaluationReport all = aggregate_report({a, b, c});
    CHECK(all.aggregates.at({DictionaryMethod::Adl, 0.5}) == doctest::Approx((0.6 + 0.8 + 0.4) / 3));
    CHECK(all.aggregates.at({DictionaryMethod::Random, 0.5}) == doctest::Approx((0.5 + 0.9 + 0.1) / 3));
    // ADL wins accuracy on a and c, RANDOM on b; ADL always has the lower recon error.
    const MethodRank adl = all.mean_ranks.at({DictionaryMethod::Adl, 0.5});
    CHECK(adl.accuracy_rank == doctest::Approx((1 + 2 + 1) / 3.0));
    CHECK(adl.recon_rank == doctest::Approx(1.0));
    const auto twin = aggregate_report({synthetic_report("a", 0.6, 0.5), synthetic_report("a2", 0.6, 0.5)});
    CHECK(twin.aggregates.at({DictionaryMethod::Adl, 0.5}) == doctest::Approx(0.6));
    CHECK_THROWS_AS(aggregate_report({a, a}), ConfigError);
    EvaluationReport other = synthetic_report("z", 0.1, 0.1);
    other.rates = {0.4};
    CHECK_THROWS_AS(aggregate_report({a, other}), ConfigError);
}

TEST_CASE("tied accuracies share the average rank") {
    const auto r = synthetic_report("t", 0.7, 0.7);
    const auto& row = r.ranks.at(DatasetRate{"t", 0.5});
    REQUIRE(row.size() == 2);
    CHECK(row[0].accuracy_rank == 1.5);
    CHECK(row[1].accuracy_rank == 1.5);
}

TEST_CASE("paired comparison") {
    const auto r = synthetic_report("p", 0.6, 0.5);
    const PairedSummary s = compare_methods(r, DictionaryMethod::Adl, DictionaryMethod::Random, 0.5);
    CHECK(s.entries.size() == 2);
    CHECK(s.mean_difference == doctest::Approx(0.1));
    CHECK(s.wins == 2);
    const PairedSummary same = compare_methods(r, DictionaryMethod::Adl, DictionaryMethod::Adl, 0.5);
    CHECK(same.mean_difference == 0.0);
    CHECK(same.ties == 2);
    CHECK_THROWS_AS(compare_methods(r, DictionaryMethod::Adl, DictionaryMethod::Somd, 0.5), MissingCellError);
    CHECK_THROWS_AS(compare_methods(r, DictionaryMethod::Adl, DictionaryMethod::Random, 0.3), MissingCellError);
}

TEST_CASE("paired comparison on wine matches the cells") {
    const Dataset wine = load_csv(std::filesystem::path(ADL_DATA_DIR) / "wine.csv", {.label_column = "class"});
    ExperimentConfig cfg;
    cfg.methods = {DictionaryMethod::Adl, DictionaryMethod::Random};
    cfg.size_rates = {0.5};
    cfg.master_seed = 3;
    const EvaluationReport r = run_experiment(wine, cfg, "wine");
    const PairedSummary s = compare_methods(r, DictionaryMethod::Adl, DictionaryMethod::Random, 0.5);
    double mean = 0.0;
    for (const auto& e : s.entries) {
        const double a = r.cells.at(CellKey{"wine", DictionaryMethod::Adl, 0.5, e.fold}).accuracy;
        const double b = r.cells.at(CellKey{"wine", DictionaryMethod::Random, 0.5, e.fold}).accuracy;
        CHECK(e.difference == a - b);
        mean += a - b;
    }
    CHECK(s.mean_difference == doctest::Approx(mean / 5));
}

TEST_CASE("a failing cell is recorded, not dropped") {
    const Dataset ds = adl::testing::with_overflowing_sample(gaussian_blobs(3, 2, 6, 1.0, 8));
    ExperimentConfig cfg = small_config();
    cfg.methods = {DictionaryMethod::Wd, DictionaryMethod::Random};
    const EvaluationReport r = run_experiment(ds, cfg, "f");
    std::set<int> failed_folds;
    int failed = 0;
    for (const auto& [key, c] : r.cells)
        if (c.failed) {
            ++failed;
            failed_folds.insert(key.fold);
            CHECK(c.error.find("NaN/Inf") != std::string::npos);
        }
    CHECK(failed_folds.size() == 1);
    CHECK(failed > 0);
    CHECK(failed < static_cast<int>(r.cells.size()));
    CHECK(r.failed_cells() == failed);
    CHECK(report_csv(r).find(",error,") != std::string::npos);
}
