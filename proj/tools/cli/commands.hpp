#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adl/dictionaries.hpp"
#include "adl/eval.hpp"
#include "adl/io.hpp"

namespace adl::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUnexpected = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitNumeric = 4,
    kExitPartialFailure = 5,
};

/// Maps the error hierarchy onto process exit codes.
int exit_code_for(const std::exception& e);

struct LearnOptions {
    std::filesystem::path manifest;
    std::string dataset;
    std::string method = "adl";
    double rate = 1.0;
    /// Held-out fold; the dictionary is built from the remaining folds.
    int fold = 0;
    std::filesystem::path out;
    /// Also write the raw held-out fold here, in the dataset's CSV layout.
    std::optional<std::filesystem::path> test_out;
    std::optional<double> lambda;
    std::optional<std::uint64_t> seed;
};

struct LearnOutcome {
    DictionaryFile file;
    std::optional<ErrorLedger> ledger;
    int train_size = 0;
    int test_size = 0;
};

/// Builds the dictionary the `evaluate` command would build for the same
/// (method, rate, fold) cell. Writes `out` (and `test_out`) when non-empty.
LearnOutcome learn(const LearnOptions& opts);
int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err);

struct ClassifyOptions {
    std::filesystem::path dict;
    std::filesystem::path data;
    std::filesystem::path out;
    /// Label column of the data file; defaults to the one stored in the dictionary.
    std::optional<std::string> label_column;
    std::optional<double> lambda;
};

struct Prediction {
    std::string id;
    int predicted = 0;
    /// Class id from the data file, -1 when absent or unknown to the dictionary.
    int truth = -1;
    Vector residuals;
    int nnz = 0;
    bool degenerate = false;
};

struct ClassifyOutcome {
    std::vector<Prediction> predictions;
    std::vector<std::string> class_names;
    bool labeled = false;
    int correct = 0;

    [[nodiscard]] double accuracy() const;
};

ClassifyOutcome classify(const ClassifyOptions& opts);
void write_predictions_csv(const ClassifyOutcome& outcome, std::ostream& out);
int cmd_classify(const ClassifyOptions& opts, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
    std::filesystem::path manifest;
    std::optional<std::filesystem::path> out_dir;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda;
};

struct EvaluateOutcome {
    EvaluationReport report;
    std::filesystem::path out_dir;
    std::vector<std::string> failed_datasets;
};

/// Runs every manifest dataset, aggregates, and writes cells.csv, timings.csv,
/// summary.json, mean_accuracy.{csv,md} and charts/<dataset>.svg.
EvaluateOutcome evaluate(const EvaluateOptions& opts, std::ostream* log = nullptr);
int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace adl::cli
