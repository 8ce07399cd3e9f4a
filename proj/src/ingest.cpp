// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "json_util.hpp"

namespace capivara::ingest {

using nlohmann::json;

std::string_view to_string(Action action) { return action == Action::kAdd ? "add" : "update"; }

PackageEvent parse_event_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw IngestError(std::string("not JSON: ") + e.what());
    }
    json_util::expect_object<IngestError>(j, {"action", "author", "path", "text", "ts"}, "event");

    PackageEvent ev;
    ev.timestamp = json_util::get_int<IngestError>(j, "ts");
    if (ev.timestamp <= 0) throw IngestError("ts must be positive");
    const std::string action = json_util::get_string<IngestError>(j, "action");
    if (action == "add") {
        ev.action = Action::kAdd;
    } else if (action == "update") {
        ev.action = Action::kUpdate;
    } else {
        throw IngestError("unknown action '" + action + "'");
    }
    ev.path = json_util::get_string<IngestError>(j, "path");
    ev.recipe_text = json_util::get_string<IngestError>(j, "text");
    ev.publisher_hint = json_util::get_string<IngestError>(j, "author");
    return ev;
}

std::string serialize_event(const PackageEvent& event) {
    json j = json::object();
    j["action"] = to_string(event.action);
    j["author"] = event.publisher_hint;
    j["path"] = event.path;
    j["text"] = event.recipe_text;
    j["ts"] = event.timestamp;
    return canonical_dump(j);
}

EventLog parse_events(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        try {
            log.events.push_back(parse_event_line(line));
        } catch (const IngestError&) {
            ++log.skipped;
            log.skipped_lines.push_back(lineno);
        }
    }
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const PackageEvent& a, const PackageEvent& b) { return a.timestamp < b.timestamp; });
    return log;
}

EventLog read_events(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path.string());
    return parse_events(in);
}

void write_events(std::ostream& out, const std::vector<PackageEvent>& events) {
    for (const auto& e : events) out << serialize_event(e) << '\n';
}

Digest event_list_digest(const std::vector<PackageEvent>& events) {
    Hasher h;
    for (const auto& e : events) {
        h.update(as_bytes(serialize_event(e)));
        h.update(as_bytes("\n"));
    }
    return h.finish();
}

TrailRule make_rule(std::string trail_name, std::string pattern) {
    try {
        std::regex re(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
        return TrailRule{std::move(trail_name), std::move(pattern), std::move(re)};
    } catch (const std::regex_error& e) {
        throw IngestError("bad pattern for trail '" + trail_name + "': " + e.what());
    }
}

std::set<std::string> assign_trails(std::string_view package_name, const std::vector<TrailRule>& rules) {
    std::set<std::string> out;
    for (const auto& rule : rules) {
        if (std::regex_search(package_name.begin(), package_name.end(), rule.compiled)) out.insert(rule.trail_name);
    }
    return out;
}

std::vector<TrailRule> default_rules(const std::vector<std::string>& trail_names) {
    static const std::string kSpecial = R"(\^$.|?*+()[]{})";
    std::vector<TrailRule> out;
    out.reserve(trail_names.size());
    for (const auto& name : trail_names) {
        std::string pattern;
        for (char c : name.substr(0, 4)) {
            const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (kSpecial.find(lower) != std::string::npos) pattern.push_back('\\');
            pattern.push_back(lower);
        }
        out.push_back(make_rule(name, std::move(pattern)));
    }
    return out;
}

}  // namespace capivara::ingest
