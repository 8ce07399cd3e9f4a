// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/sim.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "capivara/pod.hpp"

namespace capivara::sim {

using nlohmann::json;

namespace {

constexpr std::string_view kConfigKeys[] = {
    "block_interval_minutes", "custom_trails",   "default_download_range", "default_trails",
    "download_ranges",        "drain_blocks",    "genesis_offset_minutes", "master_seed",
    "max_new_trails_per_block", "max_packages_per_block", "users_per_trail", "vouch_offsets",
};

std::int64_t config_int(const json& j, std::string_view key) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return v.get<std::int64_t>();
}

std::size_t config_count(const json& j, std::string_view key) {
    const auto v = config_int(j, key);
    if (v < 0) throw ConfigError(std::string(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

DownloadRange range_from_json(const json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw ConfigError(std::string(what) + " must be [min, max] integers");
    }
    return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

json range_to_json(const DownloadRange& r) { return json::array({r.min, r.max}); }

std::string slug(std::string_view name) {
    std::string out;
    for (char c : name) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            out.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!out.empty() && out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

std::string user_name(std::string_view trail, std::size_t index) {
    std::string n = std::to_string(index);
    if (n.size() < 3) n.insert(0, 3 - n.size(), '0');
    return slug(trail) + "-" + n;
}

struct Member {
    Identity identity;
    PrivateKey key;
};

struct TrailPlan {
    std::string name;
    Height request_from{0};
    std::vector<Member> roster;  // roster[0] founds the trail
};

struct PendingPackage {
    PackageRecord record;
    std::set<std::string> trails;
    std::size_t metric{0};
};

struct DueVouch {
    Digest checksum;
    std::set<std::string> trails;
    std::size_t metric{0};
};

class Engine {
  public:
    Engine(const SimConfig& config, const std::vector<ingest::PackageEvent>& events)
        : cfg_{config},
          events_{events},
          downloads_rng_{make_stream(config.master_seed, "downloads")},
          vouches_rng_{make_stream(config.master_seed, "vouches")},
          publishers_rng_{make_stream(config.master_seed, "publishers")},
          challenges_rng_{make_stream(config.master_seed, "challenges")} {
        for (const auto& ct : cfg_.custom_trails) rules_.push_back(ingest::make_rule(ct.name, ct.pattern));
        for (auto& r : ingest::default_rules(cfg_.default_trails)) rules_.push_back(std::move(r));

        for (std::size_t i = 0; i < cfg_.custom_trails.size(); ++i) add_plan(cfg_.custom_trails[i].name, i == 0 ? 0 : 1);
        for (const auto& name : cfg_.default_trails) add_plan(name, 2);
    }

    SimResult run() {
        const Timestamp genesis_ts =
            events_.empty() ? 1 : events_.front().timestamp - cfg_.genesis_offset_minutes * 60;
        if (genesis_ts <= 0) throw ConfigError("genesis_offset_minutes reaches before the epoch");

        const TrailPlan& boot = plans_.front();
        std::vector<TrailOp> genesis_ops;
        found_trail(boot, 0, genesis_ops);
        chain::Chain chain = chain::Chain::from_genesis(chain::make_genesis(genesis_ts, std::move(genesis_ops)), scheme_);

        SimResult result{std::move(chain), {}, {}, 0};
        record_block(result, result.chain.tip(), "");

        if (!events_.empty()) {
            while (next_event_ < events_.size() || !pending_packages_.empty()) step(result, genesis_ts);
            for (std::size_t i = 0; i < cfg_.drain_blocks; ++i) step(result, genesis_ts);
        }
        result.packages = std::move(package_metrics_);
        result.skipped_events = skipped_;
        return result;
    }

  private:
    void add_plan(const std::string& name, Height request_from) {
        TrailPlan plan{name, request_from, {}};
        for (std::size_t i = 0; i < cfg_.users_per_trail; ++i) {
            const std::string uname = user_name(name, i);
            const PrivateKey key = sim_private_key(uname);
            const KeyPair kp = scheme_.enroll(key);
            plan.roster.push_back({Identity{uname, kp.public_key}, key});
            keys_.emplace(uname, key);
        }
        plan_index_.emplace(name, plans_.size());
        plans_.push_back(std::move(plan));
    }

    std::uint64_t challenge_seed() { return challenges_rng_(); }

    // Appends request + challenge at `height` and schedules the confirm, the
    // founder's invitations and their acceptance in the following blocks.
    void found_trail(const TrailPlan& plan, Height height, std::vector<TrailOp>& ops) {
        const Member& founder = plan.roster.front();
        const PublicKey& pub = founder.identity.public_key;
        ops.push_back({TrailOpKind::kCreateRequest, plan.name, founder.identity,
                       RequestPayload{scheme_.sign(request_message(plan.name, pub), founder.key)}});
        const Challenge challenge = make_challenge(scheme_, pub, challenge_seed());
        ops.push_back({TrailOpKind::kCreateChallenge, plan.name, founder.identity, challenge});

        const Height confirm_at = height + 1;
        scheduled_[confirm_at].push_back({TrailOpKind::kCreateConfirm, plan.name, founder.identity,
                                          solve_challenge(scheme_, challenge, founder.key)});

        const Height invite_at = trails::member_add_effective_height(confirm_at);
        for (std::size_t i = 1; i < plan.roster.size(); ++i) {
            const Member& invitee = plan.roster[i];
            const Challenge inv = make_challenge(scheme_, invitee.identity.public_key, challenge_seed());
            const Signature sig =
                scheme_.sign(invite_message(plan.name, invitee.identity.public_key, inv.id), founder.key);
            scheduled_[invite_at].push_back(
                {TrailOpKind::kMemberInvite, plan.name, invitee.identity, InvitePayload{founder.identity, sig, inv}});
            scheduled_[invite_at + 1].push_back({TrailOpKind::kMemberAccept, plan.name, invitee.identity,
                                                 solve_challenge(scheme_, inv, invitee.key)});
        }
    }

    void submit(const ingest::PackageEvent& ev) {
        pkgbuild::PackageRecipe recipe;
        try {
            recipe = pkgbuild::parse_pkgbuild(ev.recipe_text);
        } catch (const pkgbuild::ParseError&) {
            ++skipped_;
            return;
        }
        std::set<std::string> trails = ingest::assign_trails(recipe.name, rules_);

        std::vector<const Member*> pool;
        for (const auto& t : trails) {
            for (const auto& m : plans_[plan_index_.at(t)].roster) pool.push_back(&m);
        }
        if (pool.empty()) {
            for (const auto& p : plans_) {
                for (const auto& m : p.roster) pool.push_back(&m);
            }
        }
        const Member& publisher = *pool[uniform_index(publishers_rng_, pool.size())];

        PendingPackage pending;
        pending.record.signature = scheme_.sign(as_bytes(pkgbuild::canonical_recipe_bytes(recipe)), publisher.key);
        pending.record.recipe = std::move(recipe);
        pending.record.publisher = publisher.identity;
        pending.record.submitted_at = ev.timestamp;
        pending.trails = std::move(trails);
        pending.metric = package_metrics_.size();
        package_metrics_.push_back({pending.record.recipe.name, pending.record.recipe.version, ev.timestamp, 0, {}, {}});
        pending_packages_.push_back(std::move(pending));
    }

    void step(SimResult& result, Timestamp genesis_ts) {
        const chain::ChainState& parent = result.chain.state();
        const Height h = parent.height + 1;

        Block b;
        b.number = h;
        b.timestamp = genesis_ts + static_cast<Timestamp>(h) * cfg_.block_interval_minutes * 60;
        b.previous_hash = parent.head;

        // Trail lifecycle.
        if (auto it = scheduled_.find(h); it != scheduled_.end()) {
            b.trail_ops = std::move(it->second);
            scheduled_.erase(it);
        }
        for (const auto& plan : plans_) {
            if (plan.request_from != h) continue;
            const Member& founder = plan.roster.front();
            pending_requests_.push_back(
                {TrailOp{TrailOpKind::kCreateRequest, plan.name, founder.identity, RequestPayload{}}, b.timestamp});
        }
        auto requests = consensus::admit_trail_requests(std::move(pending_requests_), parent.popularity,
                                                        parent.registry, cfg_.max_new_trails_per_block);
        pending_requests_ = std::move(requests.deferred);
        for (const auto& r : requests.admitted) found_trail(plans_[plan_index_.at(r.request.trail_name)], h, b.trail_ops);

        // Vouches due at this height, by a random member of each matched active trail.
        if (auto it = due_vouches_.find(h); it != due_vouches_.end()) {
            for (const auto& due : it->second) {
                bool vouched = false;
                for (const auto& t : due.trails) {
                    const trails::TrailState* state = parent.registry.find(t);
                    if (state == nullptr || state->status != trails::TrailStatus::kActive || state->members.empty()) {
                        continue;
                    }
                    auto member = state->members.begin();
                    std::advance(member,
                                 static_cast<std::ptrdiff_t>(uniform_index(vouches_rng_, state->members.size())));
                    b.vouches.push_back({due.checksum, t, *member,
                                         scheme_.sign(vouch_message(due.checksum, t), keys_.at(member->name))});
                    vouched = true;
                }
                if (vouched) {
                    auto& m = package_metrics_[due.metric];
                    m.vouch_height = h;
                    m.delay_minutes = static_cast<double>((h - m.publish_height) * cfg_.block_interval_minutes);
                } else {
                    due_vouches_[h + 1].push_back(due);
                }
            }
            due_vouches_.erase(it);
        }

        // Package admission.
        while (next_event_ < events_.size() && events_[next_event_].timestamp <= b.timestamp) {
            submit(events_[next_event_++]);
        }
        std::vector<PackageRecord> records;
        records.reserve(pending_packages_.size());
        for (const auto& p : pending_packages_) records.push_back(p.record);
        auto admission =
            consensus::admit_packages(std::move(records), parent.popularity, parent.registry, cfg_.max_packages_per_block);
        std::vector<bool> taken(pending_packages_.size(), false);
        for (auto& rec : admission.admitted) {
            std::size_t i = 0;
            while (taken[i] || !(pending_packages_[i].record == rec)) ++i;
            taken[i] = true;
            const PendingPackage& p = pending_packages_[i];
            package_metrics_[p.metric].publish_height = h;
            const int k = schedule_vouch(vouches_rng_, cfg_.vouch_offsets);
            due_vouches_[h + static_cast<Height>(k)].push_back({p.record.recipe.checksum, p.trails, p.metric});
            b.packages.push_back(std::move(rec));
        }
        std::vector<PendingPackage> rest;
        for (std::size_t i = 0; i < pending_packages_.size(); ++i) {
            if (!taken[i]) rest.push_back(std::move(pending_packages_[i]));
        }
        pending_packages_ = std::move(rest);

        // Proof-of-download volume for trails active at the parent.
        std::vector<std::pair<std::string, DownloadRange>> ranges;
        const auto active = parent.registry.active_trails();
        for (const auto* t : active) {
            auto it = cfg_.download_ranges.find(t->name);
            ranges.emplace_back(t->name, it == cfg_.download_ranges.end() ? cfg_.default_download_range : it->second);
        }
        for (const auto& [trail, count] : draw_downloads(downloads_rng_, ranges)) ledger_.credit(trail, count);
        const pod::DownloadSnapshot snapshot = ledger_.snapshot_and_reset();
        for (const auto& [trail, range] : ranges) b.downloads[trail] = snapshot.per_trail.at(trail);
        b.popularity = consensus::update_popularity(parent.popularity, b.downloads);

        // Forger.
        const auto draw = consensus::draw_forger(parent.popularity, parent.registry, parent.head, h);
        b.forger = draw.forger;
        b.metadata.candidates = consensus::recorded_candidates(draw, b.popularity);
        b.metadata.popularity_at_generation = parent.popularity;
        b.metadata.amount_of_packages = b.packages.size();
        b.metadata.amount_of_valid_trails = active.size();
        b.hash = block_digest(b);
        b.forger_signature = scheme_.sign(b.hash.view(), keys_.at(draw.forger.name));

        chain::ValidationReport report = result.chain.append(b, scheme_);
        if (!report.ok()) {
            throw SimError("simulator produced an invalid block at height " + std::to_string(h) + ": " +
                               report.violations.front().message,
                           std::move(report));
        }
        record_block(result, result.chain.tip(), draw.forger_trail);
    }

    void record_block(SimResult& result, const Block& b, const std::string& forger_trail) {
        cum_packages_ += b.packages.size();
        result.blocks.push_back({b.number, b.timestamp, serialize_block(b).size(), b.packages.size(), cum_packages_,
                                 b.forger ? b.forger->name : std::string(), forger_trail, b.popularity});
    }

    const SimConfig& cfg_;
    const std::vector<ingest::PackageEvent>& events_;
    MockSignatureScheme scheme_;
    std::vector<ingest::TrailRule> rules_;
    std::vector<TrailPlan> plans_;
    std::map<std::string, std::size_t> plan_index_;
    std::map<std::string, PrivateKey> keys_;

    Rng downloads_rng_;
    Rng vouches_rng_;
    Rng publishers_rng_;
    Rng challenges_rng_;

    std::map<Height, std::vector<TrailOp>> scheduled_;
    std::vector<consensus::PendingTrailRequest> pending_requests_;
    std::vector<PendingPackage> pending_packages_;
    std::map<Height, std::vector<DueVouch>> due_vouches_;
    pod::DownloadLedger ledger_;

    std::vector<PackageMetrics> package_metrics_;
    std::size_t next_event_{0};
    std::size_t skipped_{0};
    std::size_t cum_packages_{0};
};

void open_out(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::vector<std::string> distribution_trail_names() {
    return {"ALTLinux",     "Ark Linux",      "BasicLinux",      "BioKnoppix",     "CentOS",
            "Conectiva",    "Cucumber Linux", "Debian",          "Zenwalk Linux",  "Devil-Linux",
            "Dyne:Bolic",   "Feather",        "Floppix",         "Freesco",        "Frugalware",
            "Gentoo",       "Gnoppix",        "IPCop",           "Kanotix",        "Knoppix",
            "Kurumin",      "Linux Scratch",  "Lycoris",         "Manjaro",        "Morphix",
            "Pardus",       "PHLAK",          "Puppy Linux",     "Red Hat Ent",    "SLAX",
            "Source Mage",  "SuSE",           "TopologiLinux",   "Turkix",         "Univention Corp",
            "Whitebox Linux", "Yoper",        "Amigo Linux",     "BackTrack",      "BeatrIX",
            "BLAG",         "ClusterKnoppix", "CRUX",            "DamnSmallLinux", "DeLi Linux",
            "DragOnLinux",  "Elive",          "Fedora",          "Foresight",      "Freespire",
            "G2Linx",       "Goodgoat",       "GoboLinux",       "IpodLinux",      "Kate OS",
            "Kubuntu",      "Linspire",       "Lunar Linux",     "Mandriva",       "MEPIS",
            "muLinux",      "PCLinuxOS",      "PocketLinux",     "Red Hat",        "Slackware",
            "SmoothWall",   "Sun JDS",        "SystemRescue",    "TurboLinux",     "Ubuntu Linux",
            "VectorLinux",  "Yellow Dog",     "Xandros"};
}

SimConfig default_config() {
    SimConfig c;
    c.download_ranges = {{"archlinux", {200000, 300000}},
                         {"pypy", {10000, 400000}},
                         {"perl", {100000, 100500}},
                         {"ruby", {100000, 100900}}};
    c.custom_trails = {{"archlinux", ".*"}, {"perl", "perl"}, {"pypy", "py"}, {"ruby", "rb"}, {"fal", "fal"}};
    c.default_trails = distribution_trail_names();
    return c;
}

void validate_config(const SimConfig& c) {
    if (c.block_interval_minutes <= 0) throw ConfigError("block_interval_minutes must be positive");
    if (c.genesis_offset_minutes < 0) throw ConfigError("genesis_offset_minutes must be non-negative");
    if (c.max_packages_per_block < 1 || c.max_packages_per_block > consensus::kMaxPackagesPerBlock) {
        throw ConfigError("max_packages_per_block must be in [1, 100]");
    }
    if (c.max_new_trails_per_block < 1 || c.max_new_trails_per_block > consensus::kMaxNewTrailsPerBlock) {
        throw ConfigError("max_new_trails_per_block must be in [1, 10]");
    }
    if (c.vouch_offsets.empty()) throw ConfigError("vouch_offsets must not be empty");
    double total = 0.0;
    for (const auto& [k, p] : c.vouch_offsets) {
        if (k < 1) throw ConfigError("vouch offsets must be >= 1");
        if (!(p >= 0.0)) throw ConfigError("vouch probabilities must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("vouch probabilities must sum to 1");
    if (c.drain_blocks < static_cast<std::size_t>(c.vouch_offsets.rbegin()->first)) {
        throw ConfigError("drain_blocks must cover the largest vouch offset");
    }
    auto check_range = [](const DownloadRange& r, const std::string& what) {
        if (r.min < 0 || r.min > r.max) throw ConfigError("download range for " + what + " must have 0 <= min <= max");
    };
    check_range(c.default_download_range, "others");
    for (const auto& [t, r] : c.download_ranges) check_range(r, t);
    if (c.custom_trails.empty()) throw ConfigError("at least one custom trail is required for bootstrap");
    if (c.users_per_trail < 1) throw ConfigError("users_per_trail must be >= 1");

    std::set<std::string> names;
    std::set<std::string> slugs;
    auto add_name = [&](const std::string& n) {
        if (n.empty()) throw ConfigError("trail names must be non-empty");
        if (!names.insert(n).second) throw ConfigError("duplicate trail name '" + n + "'");
        if (slug(n).empty() || !slugs.insert(slug(n)).second) {
            throw ConfigError("trail name '" + n + "' does not yield a distinct user prefix");
        }
    };
    for (const auto& ct : c.custom_trails) {
        add_name(ct.name);
        try {
            (void)ingest::make_rule(ct.name, ct.pattern);
        } catch (const ingest::IngestError& e) {
            throw ConfigError(e.what());
        }
    }
    for (const auto& n : c.default_trails) add_name(n);
}

SimConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    SimConfig c = default_config();
    if (j.contains("block_interval_minutes")) c.block_interval_minutes = config_int(j, "block_interval_minutes");
    if (j.contains("genesis_offset_minutes")) c.genesis_offset_minutes = config_int(j, "genesis_offset_minutes");
    if (j.contains("max_packages_per_block")) c.max_packages_per_block = config_count(j, "max_packages_per_block");
    if (j.contains("max_new_trails_per_block")) c.max_new_trails_per_block = config_count(j, "max_new_trails_per_block");
    if (j.contains("users_per_trail")) c.users_per_trail = config_count(j, "users_per_trail");
    if (j.contains("drain_blocks")) c.drain_blocks = config_count(j, "drain_blocks");
    if (j.contains("master_seed")) {
        if (!j.at("master_seed").is_number_unsigned()) throw ConfigError("master_seed must be a non-negative integer");
        c.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    if (j.contains("vouch_offsets")) {
        const json& v = j.at("vouch_offsets");
        if (!v.is_object()) throw ConfigError("vouch_offsets must be an object");
        c.vouch_offsets.clear();
        for (const auto& [k, p] : v.items()) {
            int offset = 0;
            auto [ptr, ec] = std::from_chars(k.data(), k.data() + k.size(), offset);
            if (ec != std::errc{} || ptr != k.data() + k.size()) throw ConfigError("vouch offset '" + k + "' is not an integer");
            if (!p.is_number()) throw ConfigError("vouch probability for offset " + k + " must be a number");
            c.vouch_offsets[offset] = p.get<double>();
        }
    }
    if (j.contains("download_ranges")) {
        const json& v = j.at("download_ranges");
        if (!v.is_object()) throw ConfigError("download_ranges must be an object");
        c.download_ranges.clear();
        for (const auto& [k, r] : v.items()) c.download_ranges[k] = range_from_json(r, "download_ranges." + k);
    }
    if (j.contains("default_download_range")) {
        c.default_download_range = range_from_json(j.at("default_download_range"), "default_download_range");
    }
    if (j.contains("custom_trails")) {
        const json& v = j.at("custom_trails");
        if (!v.is_array()) throw ConfigError("custom_trails must be an array");
        c.custom_trails.clear();
        for (const auto& t : v) {
            if (!t.is_object() || t.size() != 2 || !t.contains("name") || !t.contains("pattern") ||
                !t.at("name").is_string() || !t.at("pattern").is_string()) {
                throw ConfigError("custom_trails entries must be {\"name\": str, \"pattern\": str}");
            }
            c.custom_trails.push_back({t.at("name").get<std::string>(), t.at("pattern").get<std::string>()});
        }
    }
    if (j.contains("default_trails")) {
        const json& v = j.at("default_trails");
        if (!v.is_array()) throw ConfigError("default_trails must be an array");
        c.default_trails.clear();
        for (const auto& t : v) {
            if (!t.is_string()) throw ConfigError("default_trails entries must be strings");
            c.default_trails.push_back(t.get<std::string>());
        }
    }
    validate_config(c);
    return c;
}

json to_json(const SimConfig& c) {
    json offsets = json::object();
    for (const auto& [k, p] : c.vouch_offsets) offsets[std::to_string(k)] = p;
    json ranges = json::object();
    for (const auto& [t, r] : c.download_ranges) ranges[t] = range_to_json(r);
    json custom = json::array();
    for (const auto& ct : c.custom_trails) custom.push_back(json{{"name", ct.name}, {"pattern", ct.pattern}});
    return json{{"block_interval_minutes", c.block_interval_minutes},
                {"custom_trails", std::move(custom)},
                {"default_download_range", range_to_json(c.default_download_range)},
                {"default_trails", c.default_trails},
                {"download_ranges", std::move(ranges)},
                {"drain_blocks", c.drain_blocks},
                {"genesis_offset_minutes", c.genesis_offset_minutes},
                {"master_seed", c.master_seed},
                {"max_new_trails_per_block", c.max_new_trails_per_block},
                {"max_packages_per_block", c.max_packages_per_block},
                {"users_per_trail", c.users_per_trail},
                {"vouch_offsets", std::move(offsets)}};
}

PrivateKey sim_private_key(std::string_view user_name) {
    return PrivateKey{Hasher{}.update(as_bytes("capivara/sim-key/")).update(as_bytes(user_name)).finish()};
}

void enroll_chain_identities(const std::vector<Block>& blocks, MockSignatureScheme& scheme) {
    std::set<std::string> names;
    for (const auto& b : blocks) {
        if (b.forger) names.insert(b.forger->name);
        for (const auto& p : b.packages) names.insert(p.publisher.name);
        for (const auto& v : b.vouches) names.insert(v.member.name);
        for (const auto& c : b.metadata.candidates) names.insert(c.identity.name);
        for (const auto& op : b.trail_ops) {
            names.insert(op.subject.name);
            if (const auto* inv = std::get_if<InvitePayload>(&op.payload)) names.insert(inv->inviter.name);
            if (const auto* rem = std::get_if<RemovePayload>(&op.payload)) names.insert(rem->remover.name);
        }
    }
    for (const auto& n : names) (void)scheme.enroll(sim_private_key(n));
}

int vouch_offset_at(double u, const std::map<int, double>& offsets) {
    double cumulative = 0.0;
    for (const auto& [k, p] : offsets) {
        cumulative += p;
        if (u < cumulative) return k;
    }
    return offsets.rbegin()->first;
}

int schedule_vouch(Rng& rng, const std::map<int, double>& offsets) {
    return vouch_offset_at(unit_interval(rng), offsets);
}

consensus::DownloadCounts draw_downloads(Rng& rng, const std::vector<std::pair<std::string, DownloadRange>>& ranges) {
    consensus::DownloadCounts out;
    for (const auto& [trail, r] : ranges) out[trail] = uniform_int(rng, r.min, r.max);
    return out;
}

SimResult run(const SimConfig& config, const std::vector<ingest::PackageEvent>& events) {
    validate_config(config);
    if (!std::is_sorted(events.begin(), events.end(),
                        [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; })) {
        throw std::invalid_argument("events must be sorted by timestamp");
    }
    return Engine{config, events}.run();
}

void write_chain(const chain::Chain& chain, const std::filesystem::path& path) {
    std::ofstream out;
    open_out(out, path);
    for (const auto& b : chain.blocks()) out << serialize_block(b) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void emit_metrics(const SimResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    std::ofstream blocks;
    open_out(blocks, out_dir / "blocks.csv");
    blocks << "height,timestamp,bytes,packages,cum_packages,forger,forger_trail\n";
    for (const auto& m : result.blocks) {
        blocks << m.height << ',' << m.timestamp << ',' << m.bytes << ',' << m.packages << ',' << m.cum_packages
               << ',' << m.forger << ',' << m.forger_trail << '\n';
    }

    std::ofstream pop;
    open_out(pop, out_dir / "popularity.csv");
    pop << "height,trail,pop\n";
    for (const auto& m : result.blocks) {
        for (const auto& [trail, p] : m.popularity) pop << m.height << ',' << trail << ',' << format_double(p) << '\n';
    }

    std::ofstream pkgs;
    open_out(pkgs, out_dir / "packages.csv");
    pkgs << "name,version,submit_ts,publish_height,vouch_height,delay_minutes\n";
    for (const auto& p : result.packages) {
        pkgs << p.name << ',' << p.version << ',' << p.submit_ts << ',' << p.publish_height << ',';
        if (p.vouch_height) pkgs << *p.vouch_height;
        pkgs << ',';
        if (p.delay_minutes) pkgs << format_double(*p.delay_minutes);
        pkgs << '\n';
    }

    std::map<std::string, std::size_t> forged;
    for (const auto& [name, t] : result.chain.state().registry.trails()) forged[name] = 0;
    for (const auto& m : result.blocks) {
        if (!m.forger_trail.empty()) ++forged[m.forger_trail];
    }
    std::ofstream forgers;
    open_out(forgers, out_dir / "forgers.csv");
    forgers << "trail,blocks_forged\n";
    for (const auto& [trail, n] : forged) forgers << trail << ',' << n << '\n';

    for (auto* f : {&blocks, &pop, &pkgs, &forgers}) {
        f->flush();
        if (!*f) throw std::runtime_error("failed writing metrics to " + out_dir.string());
    }
}

}  // namespace capivara::sim
