// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/trails.hpp"

namespace capivara::trails {

namespace {

TrailViolation violation(const TrailOp& op, std::string message) {
    return {op.kind, op.trail_name, std::move(message)};
}

}  // namespace

std::string_view to_string(TrailStatus status) {
    switch (status) {
        case TrailStatus::kRequested:
            return "requested";
        case TrailStatus::kChallengePending:
            return "challenge_pending";
        case TrailStatus::kActive:
            return "active";
        case TrailStatus::kVacant:
            return "vacant";
    }
    return "unknown";
}

std::optional<TrailViolation> TrailRegistry::apply(const TrailOp& op, Height height) {
    if (!op.payload_matches_kind()) return violation(op, "payload does not match op kind");
    if (op.trail_name.empty()) return violation(op, "empty trail name");

    auto it = trails_.find(op.trail_name);
    TrailState* trail = it == trails_.end() ? nullptr : &it->second;

    switch (op.kind) {
        case TrailOpKind::kCreateRequest: {
            if (trail != nullptr && trail->status != TrailStatus::kVacant) {
                return violation(op, "trail name already taken");
            }
            TrailState fresh;
            fresh.name = op.trail_name;
            fresh.status = TrailStatus::kRequested;
            fresh.requested_by = op.subject;
            fresh.requested_at = height;
            trails_.insert_or_assign(op.trail_name, std::move(fresh));
            return std::nullopt;
        }
        case TrailOpKind::kCreateChallenge: {
            const auto& challenge = std::get<Challenge>(op.payload);
            if (trail == nullptr || trail->status != TrailStatus::kRequested || trail->requested_at != height) {
                return violation(op, "challenge without a creation request in the same block");
            }
            if (trail->requested_by != op.subject) return violation(op, "challenge subject is not the requester");
            if (challenge.target != op.subject.public_key) return violation(op, "challenge not addressed to requester");
            trail->pending_challenge = challenge;
            trail->status = TrailStatus::kChallengePending;
            return std::nullopt;
        }
        case TrailOpKind::kCreateConfirm: {
            const auto& solution = std::get<Solution>(op.payload);
            if (trail == nullptr || trail->status != TrailStatus::kChallengePending) {
                return violation(op, "confirm without pending request");
            }
            if (trail->requested_by != op.subject) return violation(op, "confirm by someone other than the requester");
            if (height < trail->requested_at + 1) return violation(op, "confirm in the request block");
            if (!verify_solution(*trail->pending_challenge, solution)) {
                return violation(op, "solution does not answer the creation challenge");
            }
            trail->status = TrailStatus::kActive;
            trail->members = {op.subject};
            trail->created_at_height = height;
            trail->pending_challenge.reset();
            trail->requested_by.reset();
            return std::nullopt;
        }
        case TrailOpKind::kMemberInvite: {
            const auto& invite = std::get<InvitePayload>(op.payload);
            if (trail == nullptr || trail->status != TrailStatus::kActive) return violation(op, "trail is not active");
            if (!trail->is_member(invite.inviter)) return violation(op, "invite by non-member");
            if (height < member_add_effective_height(trail->created_at_height)) {
                return violation(op, "member operations start the block after confirmation");
            }
            if (trail->is_member(op.subject)) return violation(op, "invitee already a member");
            if (trail->invites.contains(op.subject.public_key)) return violation(op, "invitee already invited");
            if (invite.challenge.target != op.subject.public_key) {
                return violation(op, "invite challenge not addressed to invitee");
            }
            trail->invites.emplace(op.subject.public_key,
                                   PendingInvite{op.subject, invite.inviter, invite.challenge, height});
            return std::nullopt;
        }
        case TrailOpKind::kMemberAccept: {
            const auto& solution = std::get<Solution>(op.payload);
            if (trail == nullptr || trail->status != TrailStatus::kActive) return violation(op, "trail is not active");
            auto inv = trail->invites.find(op.subject.public_key);
            if (inv == trail->invites.end() || inv->second.invitee != op.subject) {
                return violation(op, "accept without invite");
            }
            if (height < inv->second.invited_at + 1) return violation(op, "accept in the invite block");
            if (!verify_solution(inv->second.challenge, solution)) {
                return violation(op, "solution does not answer the invite challenge");
            }
            trail->members.insert(op.subject);
            trail->invites.erase(inv);
            return std::nullopt;
        }
        case TrailOpKind::kMemberRemove: {
            const auto& removal = std::get<RemovePayload>(op.payload);
            if (trail == nullptr || trail->status != TrailStatus::kActive) return violation(op, "trail is not active");
            if (!trail->is_member(op.subject)) return violation(op, "removal target is not a member");
            if (removal.remover != op.subject && !trail->is_member(removal.remover)) {
                return violation(op, "remove by outsider");
            }
            trail->members.erase(op.subject);
            if (trail->members.empty()) {
                trail->status = TrailStatus::kVacant;
                trail->invites.clear();
            }
            return std::nullopt;
        }
    }
    return violation(op, "unknown op kind");
}

void TrailRegistry::expire(Height height) {
    for (auto it = trails_.begin(); it != trails_.end();) {
        TrailState& t = it->second;
        const bool pending = t.status == TrailStatus::kRequested || t.status == TrailStatus::kChallengePending;
        if (pending && t.requested_at + kPendingExpiryBlocks < height) {
            it = trails_.erase(it);
            continue;
        }
        std::erase_if(t.invites, [&](const auto& kv) { return kv.second.invited_at + kPendingExpiryBlocks < height; });
        ++it;
    }
}

std::vector<TrailViolation> TrailRegistry::finish_block(Height height) const {
    std::vector<TrailViolation> out;
    for (const auto& [name, t] : trails_) {
        if (t.status == TrailStatus::kRequested && t.requested_at == height) {
            out.push_back({TrailOpKind::kCreateRequest, name, "creation request without challenge"});
        }
    }
    return out;
}

const TrailState* TrailRegistry::find(std::string_view name) const {
    auto it = trails_.find(name);
    return it == trails_.end() ? nullptr : &it->second;
}

bool TrailRegistry::is_authorized_voucher(std::string_view trail_name, const Identity& identity) const {
    const TrailState* t = find(trail_name);
    return t != nullptr && t->status == TrailStatus::kActive && t->is_member(identity);
}

std::vector<const TrailState*> TrailRegistry::active_trails() const {
    std::vector<const TrailState*> out;
    for (const auto& [name, t] : trails_) {
        if (t.status == TrailStatus::kActive && !t.members.empty()) out.push_back(&t);
    }
    return out;
}

}  // namespace capivara::trails
