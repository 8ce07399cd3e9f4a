// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace capivara::cli;

    CLI::App app{"Capivara package-repository chain: ingest, simulate, validate, inspect"};
    app.require_subcommand(1);

    std::string events, timeline_out;
    auto* ingest = app.add_subcommand("ingest", "Normalize an event file into a timeline");
    ingest->add_option("--events", events, "JSONL event file")->required();
    ingest->add_option("--out", timeline_out, "Timeline to write")->required();

    SimulateArgs sim;
    std::string config;
    std::string metrics;
    auto* simulate = app.add_subcommand("simulate", "Replay a timeline into a chain");
    simulate->add_option("--timeline", sim.timeline, "Timeline file")->required();
    auto* config_opt = simulate->add_option("--config", config, "Config JSON (defaults when omitted)");
    simulate->add_option("--seed", sim.seed, "Master seed")->required();
    simulate->add_option("--out", sim.out_chain, "Chain file to write")->required();
    auto* metrics_opt = simulate->add_option("--metrics", metrics, "Directory for metric CSVs");

    std::string chain_path;
    auto* validate = app.add_subcommand("validate", "Verify a chain file from genesis");
    validate->add_option("--chain", chain_path, "Chain file")->required();

    InspectArgs inspect_args;
    std::uint64_t block = 0;
    std::string hash;
    auto* inspect = app.add_subcommand("inspect", "Print a block or the trail registry");
    inspect->add_option("--chain", inspect_args.chain, "Chain file")->required();
    auto* block_opt = inspect->add_option("--block", block, "Block height");
    auto* hash_opt = inspect->add_option("--hash", hash, "Block hash");
    auto* trails_flag = inspect->add_flag("--trails", inspect_args.trails, "Trail registry at the tip");
    block_opt->excludes(hash_opt)->excludes(trails_flag);
    hash_opt->excludes(trails_flag);

    std::string recipe_path;
    auto* pkgbuild = app.add_subcommand("pkgbuild", "PKGBUILD tools");
    pkgbuild->require_subcommand(1);
    auto* parse = pkgbuild->add_subcommand("parse", "Print the canonical recipe form");
    parse->add_option("file", recipe_path, "PKGBUILD file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (ingest->parsed()) return cmd_ingest(events, timeline_out, std::cout, std::cerr);
    if (simulate->parsed()) {
        if (config_opt->count() > 0) sim.config = config;
        if (metrics_opt->count() > 0) sim.metrics_dir = metrics;
        return cmd_simulate(sim, std::cout, std::cerr);
    }
    if (validate->parsed()) return cmd_validate(chain_path, std::cout, std::cerr);
    if (inspect->parsed()) {
        if (block_opt->count() > 0) inspect_args.block = block;
        if (hash_opt->count() > 0) inspect_args.hash = hash;
        if (!inspect_args.block && !inspect_args.hash && !inspect_args.trails) {
            std::cerr << "inspect: one of --block, --hash, --trails is required\n";
            return kExitUsage;
        }
        return cmd_inspect(inspect_args, std::cout, std::cerr);
    }
    if (parse->parsed()) return cmd_pkgbuild_parse(recipe_path, std::cout, std::cerr);
    return kExitUsage;
}
