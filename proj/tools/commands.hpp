// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace capivara::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Each command writes data to `out` and diagnostics to `err`, and returns the exit code.

int cmd_ingest(const std::string& events_path, const std::string& out_path, std::ostream& out, std::ostream& err);

struct SimulateArgs {
    std::string timeline;
    std::optional<std::string> config;
    std::uint64_t seed{0};
    std::string out_chain;
    std::optional<std::string> metrics_dir;
};
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

int cmd_validate(const std::string& chain_path, std::ostream& out, std::ostream& err);

struct InspectArgs {
    std::string chain;
    std::optional<std::uint64_t> block;
    std::optional<std::string> hash;
    bool trails{false};
};
int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err);

int cmd_pkgbuild_parse(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace capivara::cli
