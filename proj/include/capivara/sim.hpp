// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "capivara/chain.hpp"
#include "capivara/consensus.hpp"
#include "capivara/crypto.hpp"
#include "capivara/ingest.hpp"

namespace capivara::sim {

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class SimError : public std::runtime_error {
  public:
    SimError(const std::string& what, chain::ValidationReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    [[nodiscard]] const chain::ValidationReport& report() const { return report_; }

  private:
    chain::ValidationReport report_;
};

struct DownloadRange {
    std::int64_t min{0};
    std::int64_t max{0};
    friend bool operator==(const DownloadRange&, const DownloadRange&) = default;
};

struct CustomTrail {
    std::string name;
    std::string pattern;
    friend bool operator==(const CustomTrail&, const CustomTrail&) = default;
};

//! The first custom trail is bootstrapped in genesis. Every other trail is
//! requested once the chain has an active trail: custom trails from block 1,
//! default-rule trails from block 2.
struct SimConfig {
    std::int64_t block_interval_minutes{20};
    std::int64_t genesis_offset_minutes{40};
    std::size_t max_packages_per_block{consensus::kMaxPackagesPerBlock};
    std::size_t max_new_trails_per_block{consensus::kMaxNewTrailsPerBlock};
    std::map<int, double> vouch_offsets{{1, 0.6}, {2, 0.2}, {3, 0.1}, {4, 0.1}};
    std::map<std::string, DownloadRange> download_ranges;
    DownloadRange default_download_range{0, 100000};
    std::vector<CustomTrail> custom_trails;
    std::vector<std::string> default_trails;
    std::size_t users_per_trail{64};
    std::size_t drain_blocks{4};
    std::uint64_t master_seed{0};

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

//! Default distribution trail names (one entry per distribution).
std::vector<std::string> distribution_trail_names();

//! Full-scale experiment: five custom trails, the distribution roster and the download ranges.
SimConfig default_config();

//! Missing keys take default_config() values; unknown keys and invalid values
//! throw ConfigError.
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& config);
//! Throws ConfigError describing the first problem.
void validate_config(const SimConfig& config);

//! Deterministic key for a simulated user. Validators rebuild the mock key
//! registry from the names found in a chain.
PrivateKey sim_private_key(std::string_view user_name);

//! Enrolls sim_private_key(name) for every identity appearing in `blocks`.
void enroll_chain_identities(const std::vector<Block>& blocks, MockSignatureScheme& scheme);

//! Offset for the first vouch, by inverting the cumulative distribution at u in [0, 1).
int vouch_offset_at(double u, const std::map<int, double>& offsets);
int schedule_vouch(Rng& rng, const std::map<int, double>& offsets);

//! One uniform draw per trail, in the order given.
consensus::DownloadCounts draw_downloads(Rng& rng, const std::vector<std::pair<std::string, DownloadRange>>& ranges);

struct BlockMetrics {
    Height height{0};
    Timestamp timestamp{0};
    std::size_t bytes{0};
    std::size_t packages{0};
    std::size_t cum_packages{0};
    std::string forger;
    std::string forger_trail;
    PopularitySnapshot popularity;
};

struct PackageMetrics {
    std::string name;
    std::string version;
    Timestamp submit_ts{0};
    Height publish_height{0};
    std::optional<Height> vouch_height;
    std::optional<double> delay_minutes;  // publish block to first vouch block
};

struct SimResult {
    chain::Chain chain;
    std::vector<BlockMetrics> blocks;
    std::vector<PackageMetrics> packages;
    std::size_t skipped_events{0};  // recipes that failed to parse
};

//! Replays `events` (ascending timestamps) into a chain. Every block goes
//! through Chain::append; a rejected block throws SimError. Throws ConfigError
//! for an invalid config.
SimResult run(const SimConfig& config, const std::vector<ingest::PackageEvent>& events);

void write_chain(const chain::Chain& chain, const std::filesystem::path& path);

//! Writes blocks.csv, popularity.csv, packages.csv and forgers.csv. Throws
//! std::runtime_error when a file cannot be written.
void emit_metrics(const SimResult& result, const std::filesystem::path& out_dir);

//! Shortest round-trip decimal form, used for every float in the CSVs.
std::string format_double(double v);

}  // namespace capivara::sim
