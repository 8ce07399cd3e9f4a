// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/chain.hpp"

#include <algorithm>
#include <map>

namespace capivara::chain {

namespace {

class Reporter {
  public:
    explicit Reporter(Height height) : height_{height} {}

    void add(Rule rule, std::string message) { report_.violations.push_back({height_, rule, std::move(message)}); }

    ValidationReport finish() {
        if (!report_.ok()) report_.first_invalid_height = height_;
        return std::move(report_);
    }

  private:
    Height height_;
    ValidationReport report_;
};

void check_integrity(const Block& block, const SignatureScheme& scheme, Reporter& r) {
    if (block_digest(block) != block.hash) r.add(Rule::kIntegrity, "block hash does not match contents");
    if (block.number == 0) {
        if (block.forger || block.forger_signature) r.add(Rule::kIntegrity, "genesis carries a forger");
        return;
    }
    if (!block.forger || !block.forger_signature) {
        r.add(Rule::kIntegrity, "missing forger or forger signature");
        return;
    }
    if (!scheme.verify(block.hash.view(), *block.forger_signature, block.forger->public_key)) {
        r.add(Rule::kIntegrity, "forger signature does not verify");
    }
}

std::string describe(const TrailOp& op) {
    return std::string(to_string(op.kind)) + " '" + op.trail_name + "' for " + op.subject.name;
}

// Applies the block's trail ops to `registry` in order, checking signatures
// and solutions before each state transition.
void check_trail_ops(trails::TrailRegistry& registry, const Block& block, const SignatureScheme& scheme, Reporter& r) {
    registry.expire(block.number);

    std::size_t new_trails = 0;
    for (const auto& op : block.trail_ops) {
        if (!op.payload_matches_kind()) {
            r.add(Rule::kTrailState, describe(op) + ": payload does not match kind");
            continue;
        }
        switch (op.kind) {
            case TrailOpKind::kCreateRequest: {
                ++new_trails;
                const auto& p = std::get<RequestPayload>(op.payload);
                if (!scheme.verify(request_message(op.trail_name, op.subject.public_key), p.signature,
                                   op.subject.public_key)) {
                    r.add(Rule::kMemberSignature, describe(op) + ": request signature does not verify");
                    continue;
                }
                break;
            }
            case TrailOpKind::kMemberInvite: {
                const auto& p = std::get<InvitePayload>(op.payload);
                if (!scheme.verify(invite_message(op.trail_name, op.subject.public_key, p.challenge.id), p.signature,
                                   p.inviter.public_key)) {
                    r.add(Rule::kMemberSignature, describe(op) + ": inviter signature does not verify");
                    continue;
                }
                break;
            }
            case TrailOpKind::kMemberRemove: {
                const auto& p = std::get<RemovePayload>(op.payload);
                if (!scheme.verify(remove_message(op.trail_name, op.subject.public_key), p.signature,
                                   p.remover.public_key)) {
                    r.add(Rule::kMemberSignature, describe(op) + ": remover signature does not verify");
                    continue;
                }
                break;
            }
            case TrailOpKind::kCreateConfirm:
            case TrailOpKind::kMemberAccept: {
                const auto& solution = std::get<Solution>(op.payload);
                const trails::TrailState* t = registry.find(op.trail_name);
                const Challenge* challenge = nullptr;
                if (t != nullptr && op.kind == TrailOpKind::kCreateConfirm && t->pending_challenge) {
                    challenge = &*t->pending_challenge;
                } else if (t != nullptr && op.kind == TrailOpKind::kMemberAccept) {
                    auto inv = t->invites.find(op.subject.public_key);
                    if (inv != t->invites.end()) challenge = &inv->second.challenge;
                }
                if (challenge != nullptr && !verify_solution(*challenge, solution)) {
                    r.add(Rule::kSolution, describe(op) + ": solution does not answer the challenge");
                    continue;
                }
                break;
            }
            case TrailOpKind::kCreateChallenge:
                break;
        }
        if (auto v = registry.apply(op, block.number)) {
            r.add(Rule::kTrailState, describe(op) + ": " + v->message);
        }
    }
    for (const auto& v : registry.finish_block(block.number)) {
        r.add(Rule::kTrailState, "'" + v.trail_name + "': " + v.message);
    }
    if (new_trails > consensus::kMaxNewTrailsPerBlock) {
        r.add(Rule::kLimits, std::to_string(new_trails) + " new-trail requests exceed the limit of " +
                                 std::to_string(consensus::kMaxNewTrailsPerBlock));
    }
}

void check_packages_and_vouches(const ChainState& parent, const Block& block, const SignatureScheme& scheme,
                                Reporter& r) {
    if (block.packages.size() > consensus::kMaxPackagesPerBlock) {
        r.add(Rule::kLimits, std::to_string(block.packages.size()) + " packages exceed the limit of " +
                                 std::to_string(consensus::kMaxPackagesPerBlock));
    }
    for (const auto& p : block.packages) {
        const std::string bytes = pkgbuild::canonical_recipe_bytes(p.recipe);
        if (!scheme.verify(as_bytes(bytes), p.signature, p.publisher.public_key)) {
            r.add(Rule::kVouch, "package '" + p.recipe.name + "' signature does not verify");
        }
    }
    for (const auto& v : block.vouches) {
        const std::string what = "vouch by " + v.member.name + " for " + v.package_checksum.hex().substr(0, 12) +
                                 " on '" + v.trail_name + "'";
        if (!scheme.verify(vouch_message(v.package_checksum, v.trail_name), v.signature, v.member.public_key)) {
            r.add(Rule::kVouch, what + ": signature does not verify");
        }
        if (!parent.registry.is_authorized_voucher(v.trail_name, v.member)) {
            r.add(Rule::kVouch, what + ": voucher is not an active member of the trail");
        }
        if (!parent.published_packages.contains(v.package_checksum)) {
            r.add(Rule::kVouch, what + ": package not published in an earlier block");
        }
    }
}

void check_consensus(const ChainState& parent, const Block& block, Reporter& r) {
    if (block.metadata.amount_of_packages != block.packages.size()) {
        r.add(Rule::kForger, "metadata amount_of_packages does not match the package list");
    }
    if (block.metadata.amount_of_valid_trails != parent.registry.active_trails().size()) {
        r.add(Rule::kForger, "metadata amount_of_valid_trails does not match the parent state");
    }
    if (block.metadata.popularity_at_generation != parent.popularity) {
        r.add(Rule::kForger, "popularity_at_generation differs from the parent snapshot");
    }

    for (const auto& [trail, count] : block.downloads) {
        if (count < 0) r.add(Rule::kForger, "negative download count for '" + trail + "'");
        const trails::TrailState* t = parent.registry.find(trail);
        if (t == nullptr || t->status != trails::TrailStatus::kActive || t->members.empty()) {
            r.add(Rule::kForger, "downloads reported for inactive trail '" + trail + "'");
        }
    }
    try {
        if (consensus::update_popularity(parent.popularity, block.downloads) != block.popularity) {
            r.add(Rule::kForger, "popularity snapshot does not follow from the parent and the downloads");
        }
    } catch (const std::invalid_argument& e) {
        r.add(Rule::kForger, e.what());
    }

    try {
        const auto draw = consensus::draw_forger(parent.popularity, parent.registry, parent.head, block.number);
        if (!block.forger || *block.forger != draw.forger) {
            r.add(Rule::kForger, "forger '" + (block.forger ? block.forger->name : std::string("<none>")) +
                                     "' is not the drawn forger '" + draw.forger.name + "'");
        }
        if (block.metadata.candidates != consensus::recorded_candidates(draw, block.popularity)) {
            r.add(Rule::kForger, "forge candidates differ from the draw on the parent state");
        }
    } catch (const consensus::NoEligibleTrail& e) {
        r.add(Rule::kForger, e.what());
    }
}

ChainState next_state(const ChainState& parent, const Block& block, trails::TrailRegistry registry) {
    ChainState next;
    next.registry = std::move(registry);
    next.popularity = block.popularity;
    next.published_packages = parent.published_packages;
    for (const auto& p : block.packages) next.published_packages.insert(p.recipe.checksum);
    next.height = block.number;
    next.head = block.hash;
    next.timestamp = block.timestamp;
    return next;
}

}  // namespace

int rule_id(Rule rule) { return static_cast<int>(rule); }

Block make_genesis(Timestamp timestamp, std::vector<TrailOp> initial_trail_ops) {
    if (timestamp <= 0) throw ChainError("genesis timestamp must be positive");
    Block b;
    b.number = 0;
    b.timestamp = timestamp;
    b.trail_ops = std::move(initial_trail_ops);
    b.hash = block_digest(b);
    return b;
}

ValidationReport validate_genesis(const Block& genesis, const SignatureScheme& scheme, ChainState* next) {
    Reporter r{genesis.number};
    check_integrity(genesis, scheme, r);
    if (genesis.number != 0) r.add(Rule::kLinkage, "genesis must have height 0");
    if (!genesis.previous_hash.is_zero()) r.add(Rule::kLinkage, "genesis previous hash must be zero");
    if (genesis.timestamp <= 0) r.add(Rule::kLinkage, "genesis timestamp must be positive");
    if (!genesis.packages.empty() || !genesis.vouches.empty()) {
        r.add(Rule::kLimits, "genesis carries packages or vouches");
    }
    if (!genesis.downloads.empty() || !genesis.popularity.empty() || genesis.metadata != ForgeMetadata{}) {
        r.add(Rule::kForger, "genesis carries consensus data");
    }
    trails::TrailRegistry registry;
    check_trail_ops(registry, genesis, scheme, r);

    ValidationReport report = r.finish();
    if (report.ok() && next != nullptr) *next = next_state(ChainState{}, genesis, std::move(registry));
    return report;
}

ValidationReport validate_block(const ChainState& parent, const Block& block, const SignatureScheme& scheme,
                                ChainState* next) {
    Reporter r{block.number};
    if (block.number != parent.height + 1) {
        r.add(Rule::kLinkage, "height " + std::to_string(block.number) + " does not follow parent " +
                                  std::to_string(parent.height));
    }
    if (block.previous_hash != parent.head) r.add(Rule::kLinkage, "previous hash does not match parent");
    if (block.timestamp < parent.timestamp) r.add(Rule::kLinkage, "timestamp earlier than parent");

    check_integrity(block, scheme, r);
    check_packages_and_vouches(parent, block, scheme, r);
    check_consensus(parent, block, r);

    trails::TrailRegistry registry = parent.registry;
    check_trail_ops(registry, block, scheme, r);

    ValidationReport report = r.finish();
    if (report.ok() && next != nullptr) *next = next_state(parent, block, std::move(registry));
    return report;
}

Chain Chain::from_genesis(Block genesis, const SignatureScheme& scheme) {
    Chain c;
    ValidationReport report = validate_genesis(genesis, scheme, &c.state_);
    if (!report.ok()) throw ChainError("invalid genesis: " + report.violations.front().message);
    c.blocks_.push_back(std::move(genesis));
    return c;
}

ValidationReport Chain::append(Block block, const SignatureScheme& scheme) {
    ChainState next;
    ValidationReport report = validate_block(state_, block, scheme, &next);
    if (report.ok()) {
        state_ = std::move(next);
        blocks_.push_back(std::move(block));
    }
    return report;
}

ValidationReport verify_chain(std::span<const Block> blocks, const SignatureScheme& scheme, ChainState* final_state) {
    if (blocks.empty()) {
        ValidationReport report;
        report.violations.push_back({0, Rule::kLinkage, "chain is empty"});
        report.first_invalid_height = 0;
        return report;
    }
    ChainState state;
    ValidationReport report = validate_genesis(blocks.front(), scheme, &state);
    if (!report.ok()) return report;
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        ChainState next;
        report = validate_block(state, blocks[i], scheme, &next);
        if (!report.ok()) {
            report.first_invalid_height = i;
            for (auto& v : report.violations) v.height = i;
            return report;
        }
        state = std::move(next);
    }
    if (final_state != nullptr) *final_state = std::move(state);
    return report;
}

ValidationReport verify_chain_lines(std::span<const std::string> lines, const SignatureScheme& scheme,
                                    ChainState* final_state) {
    std::vector<Block> blocks;
    blocks.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        ValidationReport report;
        report.first_invalid_height = i;
        try {
            Block b = parse_block(lines[i]);
            if (serialize_block(b) != lines[i]) {
                report.violations.push_back({i, Rule::kIntegrity, "stored block is not in canonical form"});
                return report;
            }
            blocks.push_back(std::move(b));
        } catch (const ModelError& e) {
            report.violations.push_back({i, Rule::kIntegrity, std::string("unparseable block: ") + e.what()});
            return report;
        }
    }
    return verify_chain(blocks, scheme, final_state);
}

std::size_t choose_head(std::span<const std::vector<Block>> candidates, const SignatureScheme& scheme) {
    if (candidates.empty()) throw std::invalid_argument("choose_head needs at least one candidate");

    std::optional<Digest> genesis;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (c.empty()) continue;
        if (!genesis) genesis = c.front().hash;
        if (c.front().hash != *genesis) throw ChainError("candidates do not share a genesis block");
        if (!verify_chain(c, scheme).ok()) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& incumbent = candidates[*best];
        if (c.size() > incumbent.size() || (c.size() == incumbent.size() && c.back().hash < incumbent.back().hash)) {
            best = i;
        }
    }
    if (!best) throw ChainError("no valid candidate chain");
    return *best;
}

}  // namespace capivara::chain
