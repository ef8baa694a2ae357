#include "oscbound/harness/config.hpp"
#include "oscbound/harness/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace oscbound::harness;
    CLI::App app{"Boundary oscillation interpolation checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    unsigned workers = 0;
    std::optional<std::uint64_t> seed;
    for (const char* name : {"verify", "meanvalue", "extremal", "sweep", "compare"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " pipeline");
        sub->add_option("--config", config_path, "experiment configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [run] output)");
        sub->add_option("--workers", workers, "worker threads (default: OSCBOUND_WORKERS or hardware)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed (overrides [run] seed)");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string mode_arg = app.get_subcommands().front()->get_name();
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << config_path << ": " << d.str() << "\n";
        return 2;
    }
    const Mode mode = *parse_mode(mode_arg);
    if (mode != cfg.mode)
        std::cerr << "note: running " << mode_arg << " although the configuration says " << mode_name(cfg.mode) << "\n";
    cfg.mode = mode;
    if (seed) cfg.seed = *seed;
    if (mode != Mode::compare && !cfg.domain) {
        std::cerr << config_path << ": missing required section [domain]\n";
        return 2;
    }
    if (mode == Mode::compare && cfg.compare_inputs.size() < 2) {
        std::cerr << config_path << ": compare mode needs [compare] inputs with at least two CSV paths\n";
        return 2;
    }

    RunOptions opt;
    opt.out_dir = out_dir;
    if (workers > 0) opt.workers = workers;
    try {
        auto outcome = run(cfg, opt);
        for (const auto& f : outcome.files) std::cout << "wrote " << f << "\n";
        if (outcome.gated_failures > 0) std::cout << outcome.gated_failures << " gated check(s) failed\n";
        if (outcome.errors > 0) std::cout << outcome.errors << " run(s) aborted with errors\n";
        return outcome.exit_code;
    } catch (const oscbound::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
