// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "capivara/model.hpp"

namespace capivara::trails {

//! Unanswered creation challenges and invitations lapse after this many blocks.
inline constexpr Height kPendingExpiryBlocks = 10;

enum class TrailStatus { kRequested, kChallengePending, kActive, kVacant };

std::string_view to_string(TrailStatus status);

struct PendingInvite {
    Identity invitee;
    Identity inviter;
    Challenge challenge;
    Height invited_at{0};
};

struct TrailState {
    std::string name;
    TrailStatus status{TrailStatus::kRequested};
    std::set<Identity> members;  // ordered by name, then key
    std::optional<Identity> requested_by;
    std::optional<Challenge> pending_challenge;
    Height requested_at{0};
    Height created_at_height{0};
    std::map<PublicKey, PendingInvite> invites;

    [[nodiscard]] bool is_member(const Identity& id) const { return members.contains(id); }
};

struct TrailViolation {
    TrailOpKind kind;
    std::string trail_name;
    std::string message;
};

//! First height at which a trail confirmed at `confirm_height` accepts member operations.
constexpr Height member_add_effective_height(Height confirm_height) { return confirm_height + 1; }

//! Name -> lifecycle state. At most one non-vacant entry per name.
//!
//! Per block the replay calls expire(h), then apply() for each op in block
//! order, then finish_block(h). apply() leaves the registry untouched when it
//! reports a violation.
class TrailRegistry {
  public:
    [[nodiscard]] std::optional<TrailViolation> apply(const TrailOp& op, Height height);

    //! Drops creation requests and invitations older than kPendingExpiryBlocks.
    void expire(Height height);

    //! Requests that never received their challenge inside the block are invalid.
    [[nodiscard]] std::vector<TrailViolation> finish_block(Height height) const;

    [[nodiscard]] const TrailState* find(std::string_view name) const;
    [[nodiscard]] bool is_authorized_voucher(std::string_view trail_name, const Identity& identity) const;

    //! Active trails with at least one member, ordered by name.
    [[nodiscard]] std::vector<const TrailState*> active_trails() const;

    [[nodiscard]] const std::map<std::string, TrailState, std::less<>>& trails() const { return trails_; }

  private:
    std::map<std::string, TrailState, std::less<>> trails_;
};

}  // namespace capivara::trails
