// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "capivara/chain.hpp"
#include "capivara/ingest.hpp"
#include "capivara/pkgbuild.hpp"
#include "capivara/sim.hpp"

namespace capivara::cli {

namespace {

bool read_text(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

bool read_lines(const std::string& path, std::vector<std::string>& lines) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return true;
}

// Parses as many leading lines as possible; used to enroll the sim keys before validation.
std::vector<Block> parse_prefix(const std::vector<std::string>& lines) {
    std::vector<Block> blocks;
    for (const auto& l : lines) {
        try {
            blocks.push_back(parse_block(l));
        } catch (const ModelError&) {
            break;
        }
    }
    return blocks;
}

}  // namespace

int cmd_ingest(const std::string& events_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
    ingest::EventLog log;
    try {
        log = ingest::read_events(events_path);
    } catch (const ingest::IngestError& e) {
        err << "ingest: " << e.what() << '\n';
        return kExitFailure;
    }
    for (auto line : log.skipped_lines) err << "ingest: skipped malformed line " << line << '\n';

    std::vector<ingest::PackageEvent> kept;
    std::size_t skipped = log.skipped;
    for (auto& ev : log.events) {
        try {
            (void)pkgbuild::parse_pkgbuild(ev.recipe_text);
            kept.push_back(std::move(ev));
        } catch (const pkgbuild::ParseError& e) {
            ++skipped;
            err << "ingest: skipped " << ev.path << " at " << ev.timestamp << ": " << e.what() << '\n';
        }
    }

    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) {
        err << "ingest: cannot write " << out_path << '\n';
        return kExitFailure;
    }
    ingest::write_events(f, kept);
    f.flush();
    if (!f) {
        err << "ingest: failed writing " << out_path << '\n';
        return kExitFailure;
    }
    out << kept.size() << " events, " << skipped << " skipped\n";
    return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    sim::SimConfig config = sim::default_config();
    if (args.config) {
        std::string text;
        if (!read_text(*args.config, text)) {
            err << "simulate: cannot read config " << *args.config << '\n';
            return kExitUsage;
        }
        try {
            config = sim::config_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            err << "simulate: config is not valid JSON: " << e.what() << '\n';
            return kExitUsage;
        } catch (const sim::ConfigError& e) {
            err << "simulate: invalid config: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    config.master_seed = args.seed;

    ingest::EventLog log;
    try {
        log = ingest::read_events(args.timeline);
    } catch (const ingest::IngestError& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitFailure;
    }
    if (log.skipped > 0) err << "simulate: " << log.skipped << " malformed timeline lines skipped\n";

    try {
        const sim::SimResult result = sim::run(config, log.events);
        if (result.skipped_events > 0) err << "simulate: " << result.skipped_events << " unparseable recipes skipped\n";
        sim::write_chain(result.chain, args.out_chain);
        if (args.metrics_dir) sim::emit_metrics(result, *args.metrics_dir);
        out << "head " << result.chain.head().hex() << '\n';
        out << "blocks " << result.chain.blocks().size() << '\n';
    } catch (const sim::ConfigError& e) {
        err << "simulate: invalid config: " << e.what() << '\n';
        return kExitUsage;
    } catch (const sim::SimError& e) {
        err << "simulate: " << e.what() << '\n';
        for (const auto& v : e.report().violations) {
            err << "  " << v.height << ' ' << chain::rule_id(v.rule) << ' ' << v.message << '\n';
        }
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "simulate: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_validate(const std::string& chain_path, std::ostream& out, std::ostream& err) {
    std::vector<std::string> lines;
    if (!read_lines(chain_path, lines)) {
        err << "validate: cannot open " << chain_path << '\n';
        return kExitFailure;
    }
    if (lines.empty()) {
        err << "validate: " << chain_path << " is empty\n";
        return kExitFailure;
    }
    MockSignatureScheme scheme;
    sim::enroll_chain_identities(parse_prefix(lines), scheme);

    chain::ChainState state;
    const chain::ValidationReport report = chain::verify_chain_lines(lines, scheme, &state);
    if (report.ok()) {
        out << "valid " << lines.size() << " blocks, head " << state.head.hex() << '\n';
        return kExitOk;
    }
    for (const auto& v : report.violations) out << v.height << ' ' << chain::rule_id(v.rule) << ' ' << v.message << '\n';
    if (report.first_invalid_height) {
        err << "validate: blocks " << *report.first_invalid_height << ".." << lines.size() - 1 << " are invalid\n";
    }
    return kExitFailure;
}

int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<std::string> lines;
    if (!read_lines(args.chain, lines)) {
        err << "inspect: cannot open " << args.chain << '\n';
        return kExitFailure;
    }
    std::vector<Block> blocks;
    try {
        for (const auto& l : lines) blocks.push_back(parse_block(l));
    } catch (const ModelError& e) {
        err << "inspect: block " << blocks.size() << " does not parse: " << e.what() << '\n';
        return kExitFailure;
    }

    if (args.trails) {
        MockSignatureScheme scheme;
        sim::enroll_chain_identities(blocks, scheme);
        chain::ChainState state;
        const auto report = chain::verify_chain(blocks, scheme, &state);
        if (!report.ok()) {
            err << "inspect: chain invalid at height " << report.violations.front().height << ": "
                << report.violations.front().message << '\n';
            return kExitFailure;
        }
        for (const auto& [name, t] : state.registry.trails()) {
            out << name << '\t' << trails::to_string(t.status) << '\t' << t.members.size() << '\t'
                << t.created_at_height << '\n';
        }
        return kExitOk;
    }

    const Block* found = nullptr;
    if (args.block) {
        if (*args.block < blocks.size()) found = &blocks[*args.block];
    } else if (args.hash) {
        for (const auto& b : blocks) {
            if (b.hash.hex() == *args.hash) found = &b;
        }
    }
    if (found == nullptr) {
        err << "inspect: no such block\n";
        return kExitFailure;
    }
    out << nlohmann::json::parse(serialize_block(*found)).dump(1) << '\n';
    return kExitOk;
}

int cmd_pkgbuild_parse(const std::string& path, std::ostream& out, std::ostream& err) {
    std::string text;
    if (!read_text(path, text)) {
        err << "pkgbuild: cannot open " << path << '\n';
        return kExitFailure;
    }
    try {
        out << pkgbuild::canonical_recipe_bytes(pkgbuild::parse_pkgbuild(text)) << '\n';
    } catch (const pkgbuild::ParseError& e) {
        err << "pkgbuild: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace capivara::cli
