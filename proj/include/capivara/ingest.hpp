// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "capivara/crypto.hpp"
#include "capivara/model.hpp"

namespace capivara::ingest {

class IngestError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class Action { kAdd, kUpdate };

std::string_view to_string(Action action);

//! One line of the event file:
//!   {"action":"add"|"update","author":str,"path":str,"text":str,"ts":int}
//! ts is integer UTC seconds and must be positive. Other keys are rejected.
struct PackageEvent {
    Timestamp timestamp{0};
    Action action{Action::kAdd};
    std::string path;
    std::string recipe_text;
    std::string publisher_hint;

    friend bool operator==(const PackageEvent&, const PackageEvent&) = default;
};

struct EventLog {
    std::vector<PackageEvent> events;  // ascending timestamp, ties in input order
    std::size_t skipped{0};
    std::vector<std::size_t> skipped_lines;  // 1-based
};

//! Blank lines are ignored; malformed lines are counted, not fatal.
EventLog parse_events(std::istream& in);
//! Throws IngestError when the file cannot be opened.
EventLog read_events(const std::filesystem::path& path);

//! Parses a single line. Throws IngestError describing the problem.
PackageEvent parse_event_line(std::string_view line);
std::string serialize_event(const PackageEvent& event);
void write_events(std::ostream& out, const std::vector<PackageEvent>& events);

//! Hash over the serialized events, for pinning a corpus.
Digest event_list_digest(const std::vector<PackageEvent>& events);

struct TrailRule {
    std::string trail_name;
    std::string pattern;
    std::regex compiled;
};

//! Case-insensitive search anywhere in the package name. Throws IngestError
//! when the pattern does not compile.
TrailRule make_rule(std::string trail_name, std::string pattern);

std::set<std::string> assign_trails(std::string_view package_name, const std::vector<TrailRule>& rules);

//! First four characters of each name, lowercased and regex-escaped.
std::vector<TrailRule> default_rules(const std::vector<std::string>& trail_names);

}  // namespace capivara::ingest
