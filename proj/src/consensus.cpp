// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/consensus.hpp"

#include <algorithm>
#include <numeric>

namespace capivara::consensus {

namespace {

double popularity_of(const PopularitySnapshot& snapshot, const std::string& trail) {
    auto it = snapshot.find(trail);
    return it == snapshot.end() ? 0.0 : it->second;
}

template <typename T, typename Key>
Admission<T> admit_by(std::vector<T> pending, std::size_t limit, Key key) {
    std::vector<std::pair<decltype(key(pending.front())), std::size_t>> order;
    order.reserve(pending.size());
    for (std::size_t i = 0; i < pending.size(); ++i) order.emplace_back(key(pending[i]), i);
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    Admission<T> out;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        auto& item = pending[order[rank].second];
        (rank < limit ? out.admitted : out.deferred).push_back(std::move(item));
    }
    return out;
}

}  // namespace

PopularitySnapshot update_popularity(const PopularitySnapshot& previous, const DownloadCounts& interval) {
    std::int64_t total = 0;
    for (const auto& [trail, count] : interval) {
        if (count < 0) throw std::invalid_argument("negative download count for trail '" + trail + "'");
        total += count;
    }
    if (total == 0) return previous;

    const auto t = static_cast<double>(total);
    PopularitySnapshot raw;
    for (const auto& [trail, pp] : previous) raw[trail] = kPreviousWeight * (pp / 100.0) * t;
    for (const auto& [trail, count] : interval) raw[trail] += kCurrentWeight * static_cast<double>(count);

    const double sum = std::accumulate(raw.begin(), raw.end(), 0.0,
                                       [](double acc, const auto& kv) { return acc + kv.second; });
    for (auto& [trail, value] : raw) value = 100.0 * value / sum;
    return raw;
}

PublisherPreference publisher_preference(const Identity& identity, const PopularitySnapshot& snapshot,
                                         const trails::TrailRegistry& registry) {
    PublisherPreference out{identity, 0.0};
    for (const auto* trail : registry.active_trails()) {
        if (trail->is_member(identity)) out.preference += popularity_of(snapshot, trail->name);
    }
    return out;
}

Digest forger_seed(const Digest& prev_hash, Height height) { return Hasher{}.update(prev_hash).update_u64(height).finish(); }

ForgerDraw select_forgers(const PopularitySnapshot& snapshot, const trails::TrailRegistry& registry,
                          const Digest& prev_hash, Height height) {
    auto eligible = registry.active_trails();
    if (eligible.empty()) throw NoEligibleTrail("no active trail with members");

    std::stable_sort(eligible.begin(), eligible.end(), [&](const auto* a, const auto* b) {
        const double pa = popularity_of(snapshot, a->name);
        const double pb = popularity_of(snapshot, b->name);
        if (pa != pb) return pa > pb;
        return a->name < b->name;
    });
    if (eligible.size() > kForgerGroupSize) eligible.resize(kForgerGroupSize);

    ForgerDraw draw;
    draw.seed = forger_seed(prev_hash, height);
    Rng rng = make_stream(draw.seed);
    for (const auto* trail : eligible) {
        auto member = trail->members.begin();
        std::advance(member, static_cast<std::ptrdiff_t>(uniform_index(rng, trail->members.size())));
        draw.top_trails.push_back(trail->name);
        draw.candidates.push_back({*member, popularity_of(snapshot, trail->name), {trail->name}});
    }
    const auto pick = uniform_index(rng, draw.candidates.size());
    draw.forger = draw.candidates[pick].identity;
    draw.forger_trail = draw.top_trails[pick];
    return draw;
}

ForgerDraw select_bootstrap_forgers(const trails::TrailRegistry& registry, const Digest& prev_hash, Height height) {
    ForgerDraw draw;
    draw.seed = forger_seed(prev_hash, height);
    for (const auto& [name, trail] : registry.trails()) {
        if (draw.candidates.size() == kForgerGroupSize) break;
        if (trail.status == trails::TrailStatus::kChallengePending && trail.requested_at < height &&
            trail.requested_by) {
            draw.top_trails.push_back(name);
            draw.candidates.push_back({*trail.requested_by, 0.0, {name}});
        }
    }
    if (draw.candidates.empty()) throw NoEligibleTrail("no active trail and no pending creation to bootstrap from");
    Rng rng = make_stream(draw.seed);
    const auto pick = uniform_index(rng, draw.candidates.size());
    draw.forger = draw.candidates[pick].identity;
    draw.forger_trail = draw.top_trails[pick];
    return draw;
}

ForgerDraw draw_forger(const PopularitySnapshot& snapshot, const trails::TrailRegistry& registry,
                       const Digest& prev_hash, Height height) {
    if (registry.active_trails().empty()) return select_bootstrap_forgers(registry, prev_hash, height);
    return select_forgers(snapshot, registry, prev_hash, height);
}

std::vector<ForgeCandidate> recorded_candidates(const ForgerDraw& draw, const PopularitySnapshot& updated) {
    std::vector<ForgeCandidate> out = draw.candidates;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].popularity = popularity_of(updated, draw.top_trails[i]);
    return out;
}

Admission<PackageRecord> admit_packages(std::vector<PackageRecord> pending, const PopularitySnapshot& snapshot,
                                        const trails::TrailRegistry& registry, std::size_t limit) {
    if (pending.empty()) return {};
    std::map<Identity, double> cache;
    auto preference = [&](const Identity& id) {
        auto it = cache.find(id);
        if (it == cache.end()) it = cache.emplace(id, publisher_preference(id, snapshot, registry).preference).first;
        return it->second;
    };
    return admit_by(std::move(pending), limit, [&](const PackageRecord& r) {
        return std::make_tuple(-preference(r.publisher), r.submitted_at, r.recipe.name);
    });
}

Admission<PendingTrailRequest> admit_trail_requests(std::vector<PendingTrailRequest> pending,
                                                    const PopularitySnapshot& snapshot,
                                                    const trails::TrailRegistry& registry, std::size_t limit) {
    if (pending.empty()) return {};
    return admit_by(std::move(pending), limit, [&](const PendingTrailRequest& r) {
        return std::make_tuple(-publisher_preference(r.request.subject, snapshot, registry).preference,
                               r.requested_at, r.request.trail_name);
    });
}

}  // namespace capivara::consensus
