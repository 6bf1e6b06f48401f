// idrr: prepare / train / evaluate / analyze / baseline.
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "idrr/cli.hpp"

int main(int argc, char** argv) {
    using namespace idrr::cli;
    CLI::App app{"Implicit discourse relation recognition toolkit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    GlobalOptions global;
    std::uint64_t seed = 0;
    std::string data_dir, run_dir;
    EvaluateOptions eval;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", global.config_path, "experiment config (key = value)");
        if (needs_config) c->required();
        sub->add_option("--out", global.out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override the configured seed(s)");
        sub->add_flag("--force", global.force, "overwrite a completed output directory");
    };

    auto* prepare = app.add_subcommand("prepare", "load and adapt DiscoGeM, write the stratified split");
    add_common(prepare, true);

    auto* train = app.add_subcommand("train", "train one model per seed and evaluate on the test split");
    add_common(train, true);
    train->add_option("--data", data_dir, "directory written by 'prepare'")->required();

    auto* evaluate = app.add_subcommand("evaluate", "evaluate saved checkpoints on a test set");
    add_common(evaluate, false);
    evaluate->add_option("--run", eval.run_dir, "directory written by 'train'")->required();
    evaluate->add_option("--test", eval.test, "discogem | lin | ji | cross")
        ->check(CLI::IsMember({"discogem", "lin", "ji", "cross"}, CLI::ignore_case));
    evaluate->add_option("--data", eval.data_dir, "prepared DiscoGeM data (for --test discogem)");
    evaluate->add_option("--pdtb", eval.pdtb_path, "PDTB 3.0 relations file");

    auto* analyze = app.add_subcommand("analyze", "annotation agreement and sense coherence");
    add_common(analyze, true);
    analyze->add_option("--data", data_dir, "directory written by 'prepare'")->required();
    analyze->add_option("--run", run_dir, "directory written by 'train' (adds coherence.csv)");

    auto* baseline = app.add_subcommand("baseline", "random baseline from training-split marginals");
    add_common(baseline, true);
    baseline->add_option("--data", data_dir, "directory written by 'prepare'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    for (auto* sub : {prepare, train, evaluate, analyze, baseline}) {
        if (sub->parsed() && sub->count("--seed") > 0) global.seed = seed;
    }

    try {
        if (prepare->parsed()) cmd_prepare(global, std::cout);
        else if (train->parsed()) cmd_train(global, data_dir, std::cout);
        else if (evaluate->parsed()) cmd_evaluate(global, eval, std::cout);
        else if (analyze->parsed()) cmd_analyze(global, data_dir, run_dir, std::cout);
        else if (baseline->parsed()) cmd_baseline(global, data_dir, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kSuccess;
}
