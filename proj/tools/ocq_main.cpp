#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ocq_app/app.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"Impurity quench in a trapped 1D Fermi gas"};
    cli.require_subcommand(1);

    ocq::app::CommandOptions opts;
    std::string scenario;
    std::string cache;
    std::uint64_t seed = 0;

    for (const auto& name : ocq::app::command_names()) {
        auto* sub = cli.add_subcommand(name);
        sub->add_option("--scenario,-s", scenario, "scenario file")->check(CLI::ExistingFile);
        sub->add_option("--out,-o", opts.out_dir, "output directory");
        sub->add_option("--cache", cache, "spectrum cache directory");
        sub->add_flag("--no-cache", "recompute spectra without touching the cache")
            ->each([&](const std::string&) { opts.use_cache = false; });
        sub->add_option("--threads,-j", opts.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_flag("--svg", opts.svg, "also write SVG plots");
        sub->callback([&, name, sub] {
            opts.command = name;
            if (!scenario.empty()) opts.scenario = scenario;
            if (!cache.empty()) opts.cache_dir = cache;
            if (sub->count("--seed") > 0) opts.seed = seed;
        });
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : ocq::app::kUsageError;
    }
    return ocq::app::run_command(opts, std::cout, std::cerr);
}
