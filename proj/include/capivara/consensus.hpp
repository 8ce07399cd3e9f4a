// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "capivara/model.hpp"
#include "capivara/trails.hpp"

namespace capivara::consensus {

inline constexpr std::size_t kMaxPackagesPerBlock = 100;
inline constexpr std::size_t kMaxNewTrailsPerBlock = 10;
inline constexpr std::size_t kForgerGroupSize = 4;

//! Weight of the previous popularity in the per-block blend; the remainder goes
//! to the current interval's download share.
inline constexpr double kPreviousWeight = 0.3;
inline constexpr double kCurrentWeight = 0.7;

using DownloadCounts = std::map<std::string, std::int64_t>;

class NoEligibleTrail : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Blends the previous snapshot with this interval's confirmed downloads:
//!   raw(trail) = 0.3 * (pp / 100) * t + 0.7 * cp,   pop = 100 * raw / sum(raw)
//! where t is the interval total and cp the trail's own count. Trails new to the
//! snapshot enter with pp = 0. With t = 0 the snapshot is returned unchanged.
//! Throws std::invalid_argument for negative counts.
PopularitySnapshot update_popularity(const PopularitySnapshot& previous, const DownloadCounts& interval);

struct PublisherPreference {
    Identity identity;
    double preference{0.0};
};

//! Sum of popularity over the active trails `identity` is a member of.
PublisherPreference publisher_preference(const Identity& identity, const PopularitySnapshot& snapshot,
                                         const trails::TrailRegistry& registry);

struct ForgerDraw {
    Digest seed;
    std::vector<std::string> top_trails;
    std::vector<ForgeCandidate> candidates;  // one per top trail, same order
    Identity forger;
    std::string forger_trail;
};

//! seed = H(prev_hash | height). Takes the (up to) four most popular active
//! trails with members (ties by name), draws one member from each, then draws
//! the forger uniformly among those candidates. Throws NoEligibleTrail.
ForgerDraw select_forgers(const PopularitySnapshot& snapshot, const trails::TrailRegistry& registry,
                          const Digest& prev_hash, Height height);

//! Used while no trail is active yet: candidates are the requesters of pending
//! creations that can be confirmed at `height`. Throws NoEligibleTrail.
ForgerDraw select_bootstrap_forgers(const trails::TrailRegistry& registry, const Digest& prev_hash, Height height);

//! select_forgers, falling back to select_bootstrap_forgers when no trail is active.
ForgerDraw draw_forger(const PopularitySnapshot& snapshot, const trails::TrailRegistry& registry,
                       const Digest& prev_hash, Height height);

Digest forger_seed(const Digest& prev_hash, Height height);

//! Candidates as recorded in block metadata: the draw's identities and trails,
//! with each candidate's popularity read from the block's updated snapshot.
std::vector<ForgeCandidate> recorded_candidates(const ForgerDraw& draw, const PopularitySnapshot& updated);

template <typename T>
struct Admission {
    std::vector<T> admitted;
    std::vector<T> deferred;
};

//! Orders by (preference desc, submitted_at asc, package name asc) and admits
//! the first kMaxPackagesPerBlock. Order among exact ties is input order.
Admission<PackageRecord> admit_packages(std::vector<PackageRecord> pending, const PopularitySnapshot& snapshot,
                                        const trails::TrailRegistry& registry,
                                        std::size_t limit = kMaxPackagesPerBlock);

struct PendingTrailRequest {
    TrailOp request;  // kind == kCreateRequest
    Timestamp requested_at{0};
};

//! Same ordering as admit_packages applied to requesters, tie-broken by
//! (request time, trail name); admits at most kMaxNewTrailsPerBlock.
Admission<PendingTrailRequest> admit_trail_requests(std::vector<PendingTrailRequest> pending,
                                                    const PopularitySnapshot& snapshot,
                                                    const trails::TrailRegistry& registry,
                                                    std::size_t limit = kMaxNewTrailsPerBlock);

}  // namespace capivara::consensus
