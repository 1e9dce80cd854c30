#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace adl::cli;

    CLI::App app{"Active dictionary learning toolkit: learn, classify, evaluate"};
    app.require_subcommand(1);

    LearnOptions learn_opts;
    std::optional<double> learn_lambda;
    std::optional<std::uint64_t> learn_seed;
    std::optional<std::string> learn_test_out;
    std::string learn_out;
    auto* learn = app.add_subcommand("learn", "Build one dictionary from a manifest dataset and serialize it");
    learn->add_option("--manifest", learn_opts.manifest, "Run manifest (JSON)")->required();
    learn->add_option("--dataset", learn_opts.dataset, "Dataset id from the manifest")->required();
    learn->add_option("--method", learn_opts.method, "adl | wd | random | som | ngas")->required();
    learn->add_option("--rate", learn_opts.rate, "Dictionary size rate in (0, 1]");
    learn->add_option("--fold", learn_opts.fold, "Held-out fold index (default 0)");
    learn->add_option("--out", learn_out, "Dictionary file to write")->required();
    learn->add_option("--test-out", learn_test_out, "Also write the held-out fold as CSV");
    learn->add_option("--lambda", learn_lambda, "Override the lasso weight");
    learn->add_option("--seed", learn_seed, "Override the master seed");

    ClassifyOptions classify_opts;
    std::optional<std::string> classify_label;
    std::optional<double> classify_lambda;
    std::string classify_dict, classify_data, classify_out;
    auto* classify = app.add_subcommand("classify", "Label samples by class-wise sparse reconstruction residual");
    classify->add_option("--dict", classify_dict, "Dictionary file")->required();
    classify->add_option("--data", classify_data, "CSV data file with header")->required();
    classify->add_option("--out", classify_out, "Predictions CSV to write")->required();
    classify->add_option("--label-column", classify_label, "Label column of the data file");
    classify->add_option("--lambda", classify_lambda, "Override the lasso weight");

    EvaluateOptions eval_opts;
    std::string eval_manifest;
    std::optional<std::string> eval_out;
    std::optional<int> eval_jobs;
    std::optional<std::uint64_t> eval_seed;
    std::optional<double> eval_lambda;
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validated benchmark of every method and size rate");
    evaluate->add_option("--manifest", eval_manifest, "Run manifest (JSON)")->required();
    evaluate->add_option("--out-dir", eval_out, "Output directory (overrides the manifest)");
    evaluate->add_option("--jobs", eval_jobs, "Parallel cell workers")->check(CLI::PositiveNumber);
    evaluate->add_option("--seed", eval_seed, "Override the master seed");
    evaluate->add_option("--lambda", eval_lambda, "Override the lasso weight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (learn->parsed()) {
        learn_opts.out = learn_out;
        learn_opts.lambda = learn_lambda;
        learn_opts.seed = learn_seed;
        if (learn_test_out) learn_opts.test_out = *learn_test_out;
        return cmd_learn(learn_opts, std::cout, std::cerr);
    }
    if (classify->parsed()) {
        classify_opts.dict = classify_dict;
        classify_opts.data = classify_data;
        classify_opts.out = classify_out;
        classify_opts.label_column = classify_label;
        classify_opts.lambda = classify_lambda;
        return cmd_classify(classify_opts, std::cout, std::cerr);
    }
    eval_opts.manifest = eval_manifest;
    if (eval_out) eval_opts.out_dir = *eval_out;
    eval_opts.jobs = eval_jobs;
    eval_opts.seed = eval_seed;
    eval_opts.lambda = eval_lambda;
    return cmd_evaluate(eval_opts, std::cout, std::cerr);
}
