// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "capivara/consensus.hpp"
#include "capivara/model.hpp"
#include "capivara/trails.hpp"

namespace capivara::chain {

class ChainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Block validity rules. Numbers are stable and printed by the validator.
enum class Rule {
    kLinkage = 1,          // previous hash, height, timestamp
    kLimits = 2,           // package and new-trail caps
    kVouch = 3,            // package/vouch signatures and voucher authorization
    kMemberSignature = 4,  // trail request/invite/remove signatures
    kSolution = 5,         // challenge solutions for confirm/accept
    kForger = 6,           // forger draw, metadata, popularity update
    kIntegrity = 7,        // block hash, forger signature, canonical encoding
    kTrailState = 8,       // lifecycle transitions (name taken, ordering, ...)
};

int rule_id(Rule rule);

struct Violation {
    Height height{0};
    Rule rule{Rule::kIntegrity};
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    //! verify_chain: lowest invalid height. Every block at or above it is invalid
    //! because it descends from an invalid block.
    std::optional<Height> first_invalid_height;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

//! Replayed state after a block: what validation of the next block depends on.
struct ChainState {
    trails::TrailRegistry registry;
    PopularitySnapshot popularity;
    std::set<Digest> published_packages;
    Height height{0};
    Digest head;
    Timestamp timestamp{0};
};

//! Height-0 block: zero previous hash, no packages, carrying the bootstrap trail ops.
//! Throws ChainError when timestamp <= 0.
Block make_genesis(Timestamp timestamp, std::vector<TrailOp> initial_trail_ops);

//! Checks `block` as the successor of `parent`. Never throws on malformed
//! content; every problem is reported with its rule. When the report is empty
//! and `next` is non-null, *next receives the post-block state.
ValidationReport validate_block(const ChainState& parent, const Block& block, const SignatureScheme& scheme,
                                ChainState* next = nullptr);

ValidationReport validate_genesis(const Block& genesis, const SignatureScheme& scheme, ChainState* next = nullptr);

//! Validated append-only chain. Single writer.
class Chain {
  public:
    //! Throws ChainError when the genesis block is invalid.
    static Chain from_genesis(Block genesis, const SignatureScheme& scheme);

    //! Appends when valid; otherwise leaves the chain unchanged and returns the violations.
    [[nodiscard]] ValidationReport append(Block block, const SignatureScheme& scheme);

    [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
    [[nodiscard]] const Block& tip() const { return blocks_.back(); }
    [[nodiscard]] const Digest& head() const { return state_.head; }
    [[nodiscard]] Height height() const { return state_.height; }
    [[nodiscard]] const ChainState& state() const { return state_; }

  private:
    Chain() = default;
    std::vector<Block> blocks_;
    ChainState state_;
};

//! Replays every block from genesis. Stops at the first invalid block.
ValidationReport verify_chain(std::span<const Block> blocks, const SignatureScheme& scheme,
                              ChainState* final_state = nullptr);

//! Same, starting from stored lines: each must parse and be in canonical form.
ValidationReport verify_chain_lines(std::span<const std::string> lines, const SignatureScheme& scheme,
                                    ChainState* final_state = nullptr);

//! Index of the longest fully valid candidate; equal lengths go to the lower
//! head digest. Throws std::invalid_argument for an empty list, ChainError when
//! genesis blocks differ or no candidate is valid.
std::size_t choose_head(std::span<const std::vector<Block>> candidates, const SignatureScheme& scheme);

}  // namespace capivara::chain
