// rankstab: rank-stability experiments for hierarchical forecast benchmarks.
#include "rankstab/app.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace rankstab::app;

    CLI::App cli{"Rank stability of hierarchical forecast evaluation setups"};
    cli.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    std::string experiment;
    std::uint64_t seed = 0;
    std::size_t splits = 0;
    std::string out_dir;
    std::string format;
    unsigned threads = 0;

    auto add_config_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "master seed (unsigned 64-bit)");
        sub->add_option("--splits", splits, "number of random half splits")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "output directory (overrides " + std::string(kOutDirEnv) + ")");
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--threads", threads, "worker threads for split experiments")->check(CLI::PositiveNumber);
    };

    auto* validate_cmd = cli.add_subcommand("validate", "check dataset, forecasts, prices and reference");
    add_config_flags(validate_cmd);
    auto* run_cmd = cli.add_subcommand("run", "run experiments and write reports");
    add_config_flags(run_cmd);
    run_cmd->add_option("--experiment", experiment, "experiment to run")->check(CLI::IsMember(kExperiments));
    std::string demo_dir;
    auto* demo_cmd = cli.add_subcommand("seed-demo", "write the bundled mini fixture");
    demo_cmd->add_option("dir", demo_dir, "output directory")->required();

    CLI11_PARSE(cli, argc, argv);

    if (*demo_cmd) return cmd_seed_demo(demo_dir, std::cout, std::cerr);

    RunConfig config;
    try {
        config = load_config(config_path);
        auto* sub = *run_cmd ? run_cmd : validate_cmd;
        if (!experiment.empty()) overrides.experiment = experiment;
        if (sub->count("--seed")) overrides.seed = seed;
        if (sub->count("--splits")) overrides.splits = splits;
        if (!out_dir.empty()) overrides.out = out_dir;
        if (!format.empty()) overrides.format = format;
        if (sub->count("--threads")) overrides.threads = threads;
        apply_overrides(config, overrides);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    if (*validate_cmd) return cmd_validate(config, std::cout, std::cerr);
    return cmd_run(config, std::cout, std::cerr);
}
