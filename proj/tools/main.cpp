#include <cstdlib>
#include <iostream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace ins::cli;

    CLI::App app{"Simulate and analyze interactive narrative systems"};
    app.require_subcommand(1);

    CliConfig config;
    std::string format = "table";
    bool no_snapshots = false;
    std::string seed_text;

    auto add_story = [&](CLI::App* sub) {
        sub->add_option("--story", config.story_path, "Story file (.story)")->required();
    };
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--runs", config.n_runs, "Number of simulated runs")->capture_default_str();
        sub->add_option("--seed", seed_text, "Master seed (overrides INS_SIM_SEED; default 42)");
        sub->add_option("--max-steps", config.max_steps, "Step cap per run")->capture_default_str();
        sub->add_option("--out", config.output_dir, "Directory for report and trace files");
        sub->add_flag("--no-snapshots", no_snapshots, "Omit per-step probability matrices from traces");
        sub->add_option("--format", format, "Summary format on standard output")
            ->check(CLI::IsMember({"table", "structured"}))
            ->capture_default_str();
    };

    auto* validate = app.add_subcommand("validate", "Check a story against the structural characteristics");
    add_story(validate);

    auto* simulate = app.add_subcommand("simulate", "Run a seeded batch against one manager");
    add_story(simulate);
    simulate->add_option("--manager", config.managers, "vanilla, fairy or mimesis")->required()->expected(1);
    add_run_flags(simulate);

    auto* compare = app.add_subcommand("compare", "Run the same batch against several managers");
    add_story(compare);
    compare->add_option("--manager", config.managers, "Repeat for each manager (default: all three)");
    add_run_flags(compare);

    auto* play = app.add_subcommand("play", "Step through a story interactively");
    add_story(play);
    play->add_option("--manager", config.managers, "vanilla, fairy or mimesis")->expected(1);
    play->add_option("--seed", seed_text, "Seed for manager-side event draws");
    play->add_option("--out", config.output_dir, "Directory for the session trace");

    auto* oracle = app.add_subcommand("oracle", "Exact absorption probabilities under vanilla dynamics");
    add_story(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (seed_text.empty()) {
        if (const char* env = std::getenv("INS_SIM_SEED")) seed_text = env;
    }
    if (!seed_text.empty()) {
        try {
            std::size_t used = 0;
            config.master_seed = std::stoull(seed_text, &used);
            if (used != seed_text.size()) throw std::invalid_argument(seed_text);
        } catch (const std::exception&) {
            std::cerr << "invalid seed '" << seed_text << "'\n";
            return kExitInput;
        }
    }
    config.snapshots = !no_snapshots;
    config.format = format == "structured" ? ReportFormat::Structured : ReportFormat::Table;

    try {
        if (*validate) return cmd_validate(config.story_path, std::cout, std::cerr);
        if (*simulate) return cmd_simulate(config, std::cout, std::cerr);
        if (*compare) return cmd_compare(config, std::cout, std::cerr);
        if (*oracle) return cmd_oracle(config.story_path, std::cout, std::cerr);
        if (*play) {
            if (!isatty(STDIN_FILENO)) {
                std::cerr << "play needs an interactive terminal on standard input\n";
                return kExitInput;
            }
            return cmd_play(config, std::cin, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitInput;
}
