#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace phonon::cli;

int main(int argc, char** argv) {
    CLI::App app{"Phonon transport forward/adjoint solver and reflection-coefficient reconstruction"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::size_t jobs = 1;
    std::uint64_t seed_sgd = 0;
    std::uint64_t seed_data = 0;
    bool print_config = false;

    auto* config_opt = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "Built-in configuration (fig3, fig5, example1, example2, example3, ...)")
        ->excludes(config_opt);
    app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
    app.add_option("--jobs", jobs, "Worker threads for dataset generation and finite differences")
        ->check(CLI::PositiveNumber);
    auto* sgd_opt = app.add_option("--seed-sgd", seed_sgd, "Override inversion.seed");
    auto* data_opt = app.add_option("--seed-data", seed_data, "Override experiment.seed");
    app.add_flag("--print-config", print_config, "Print the effective configuration as JSON and exit");

    for (const char* name : {"forward", "adjoint", "generate", "reconstruct", "verify"})
        app.add_subcommand(name)->fallthrough();
    app.get_subcommand("forward")->description("Forward solve: surface deltaT and field snapshots");
    app.get_subcommand("adjoint")->description("Adjoint solve: backward snapshots and the eta gradient");
    app.get_subcommand("generate")->description("Synthetic dataset from the configured truth");
    app.get_subcommand("reconstruct")->description("SGD reconstruction of eta");
    app.get_subcommand("verify")->description("Run the verification probe battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else if (!preset_name.empty()) {
            cfg = preset(preset_name);
        }
    } catch (const std::exception& e) {
        std::cerr << "phonon-inverse: config: " << e.what() << '\n';
        return exit_usage;
    }
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (sgd_opt->count() > 0) cfg.inversion.seed = seed_sgd;
    if (data_opt->count() > 0) cfg.experiment.seed = seed_data;

    if (print_config) {
        std::cout << config_to_json(cfg).dump(2) << '\n';
        return exit_ok;
    }

    RunContext ctx;
    ctx.jobs = jobs;
    ctx.log = &std::cout;
    ctx.preset = preset_name;
    const std::string command = app.get_subcommands().front()->get_name();
    return run_command(command, cfg, ctx, std::cerr);
}
