// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "capivara/crypto.hpp"
#include "capivara/pkgbuild.hpp"

namespace capivara {

using Height = std::uint64_t;
using Timestamp = std::int64_t;  // UTC seconds

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Identity {
    std::string name;
    PublicKey public_key;

    friend auto operator<=>(const Identity&, const Identity&) = default;
};

struct PackageRecord {
    pkgbuild::PackageRecipe recipe;
    Identity publisher;
    Signature signature;  // over canonical recipe bytes
    Timestamp submitted_at{0};

    friend bool operator==(const PackageRecord&, const PackageRecord&) = default;
};

struct VouchRecord {
    Digest package_checksum;
    std::string trail_name;
    Identity member;
    Signature signature;  // over vouch_message(package_checksum, trail_name)

    friend bool operator==(const VouchRecord&, const VouchRecord&) = default;
};

enum class TrailOpKind { kCreateRequest, kCreateChallenge, kCreateConfirm, kMemberInvite, kMemberAccept, kMemberRemove };

std::string_view to_string(TrailOpKind kind);
std::optional<TrailOpKind> trail_op_kind_from_string(std::string_view s);

struct RequestPayload {
    Signature signature;  // requester over request_message(trail, requester)
    friend bool operator==(const RequestPayload&, const RequestPayload&) = default;
};

struct InvitePayload {
    Identity inviter;
    Signature signature;  // inviter over invite_message(trail, invitee, challenge.id)
    Challenge challenge;
    friend bool operator==(const InvitePayload&, const InvitePayload&) = default;
};

struct RemovePayload {
    Identity remover;
    Signature signature;  // remover over remove_message(trail, target)
    friend bool operator==(const RemovePayload&, const RemovePayload&) = default;
};

using TrailOpPayload = std::variant<RequestPayload, Challenge, Solution, InvitePayload, RemovePayload>;

//! One trail lifecycle step. The payload alternative is fixed by the kind:
//! CreateRequest->RequestPayload, CreateChallenge->Challenge, CreateConfirm and
//! MemberAccept->Solution, MemberInvite->InvitePayload, MemberRemove->RemovePayload.
struct TrailOp {
    TrailOpKind kind{TrailOpKind::kCreateRequest};
    std::string trail_name;
    Identity subject;
    TrailOpPayload payload;

    [[nodiscard]] bool payload_matches_kind() const;
    friend bool operator==(const TrailOp&, const TrailOp&) = default;
};

//! Trail name -> popularity percentage. Ordered so serialization is canonical.
using PopularitySnapshot = std::map<std::string, double>;

struct PopularityEntry {
    std::string trail_name;
    double pop{0.0};
};

struct ForgeCandidate {
    Identity identity;
    double popularity{0.0};
    std::vector<std::string> trails;

    friend bool operator==(const ForgeCandidate&, const ForgeCandidate&) = default;
};

struct ForgeMetadata {
    std::vector<ForgeCandidate> candidates;
    PopularitySnapshot popularity_at_generation;
    std::uint64_t amount_of_packages{0};
    std::uint64_t amount_of_valid_trails{0};

    friend bool operator==(const ForgeMetadata&, const ForgeMetadata&) = default;
};

struct Block {
    Height number{0};
    Timestamp timestamp{0};
    Digest previous_hash;
    std::optional<Identity> forger;  // absent only in genesis
    std::optional<Signature> forger_signature;
    std::vector<PackageRecord> packages;
    std::vector<VouchRecord> vouches;
    std::vector<TrailOp> trail_ops;
    std::map<std::string, std::int64_t> downloads;  // confirmed downloads this interval
    PopularitySnapshot popularity;                  // after this block's update
    ForgeMetadata metadata;
    Digest hash;

    friend bool operator==(const Block&, const Block&) = default;
};

// Signed payloads. Each starts with a domain tag so one signature can never
// stand in for another kind.
Bytes vouch_message(const Digest& package_checksum, std::string_view trail_name);
Bytes request_message(std::string_view trail_name, const PublicKey& requester);
Bytes invite_message(std::string_view trail_name, const PublicKey& invitee, const Digest& challenge_id);
Bytes remove_message(std::string_view trail_name, const PublicKey& target);

//! Hash preimage: sorted keys, minified, without `hash` and `forger_signature`
//! (the forger signs the hash, so the signature cannot be part of it).
std::string canonical_serialize(const Block& block);
Digest block_digest(const Block& block);

//! Full stored form, one line, including `hash` and `forger_signature`.
std::string serialize_block(const Block& block);
//! Strict parse of the stored form. Throws ModelError on anything malformed,
//! including unknown keys, wrong types, or non-lowercase hex.
Block parse_block(std::string_view line);

nlohmann::json to_json(const Identity& id);
Identity identity_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrailOp& op);
TrailOp trail_op_from_json(const nlohmann::json& j);

//! Minified dump used for every canonical form in the project.
std::string canonical_dump(const nlohmann::json& j);

//! Popularity snapshot as the display list [{"name":..,"pop":..}].
nlohmann::json popularity_to_json(const PopularitySnapshot& snapshot);
std::vector<PopularityEntry> popularity_entries(const PopularitySnapshot& snapshot);

}  // namespace capivara
