// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/model.hpp"

#include <array>

#include "json_util.hpp"

namespace capivara {

namespace {

using nlohmann::json;
namespace ju = json_util;

constexpr std::array<std::pair<TrailOpKind, std::string_view>, 6> kKindNames{{
    {TrailOpKind::kCreateRequest, "create_request"},
    {TrailOpKind::kCreateChallenge, "create_challenge"},
    {TrailOpKind::kCreateConfirm, "create_confirm"},
    {TrailOpKind::kMemberInvite, "member_invite"},
    {TrailOpKind::kMemberAccept, "member_accept"},
    {TrailOpKind::kMemberRemove, "member_remove"},
}};

Bytes tagged(std::string_view tag, std::initializer_list<ByteView> parts) {
    Bytes out(tag.begin(), tag.end());
    out.push_back(0);
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

Signature signature_from_json(const json& j, std::string_view key, const PublicKey& signer) {
    return {ju::get_digest<ModelError>(j, key), signer};
}

json to_json(const Challenge& c) {
    return json{{"commitment", c.commitment.hex()},
                {"id", c.id.hex()},
                {"sealed_nonce", to_hex(c.sealed_nonce)},
                {"target", c.target.hex()}};
}

Challenge challenge_from_json(const json& j) {
    ju::expect_object<ModelError>(j, {"commitment", "id", "sealed_nonce", "target"}, "challenge");
    Challenge c;
    c.commitment = ju::get_digest<ModelError>(j, "commitment");
    c.id = ju::get_digest<ModelError>(j, "id");
    c.sealed_nonce = ju::get_hex_bytes<ModelError>(j, "sealed_nonce");
    c.target = PublicKey{ju::get_digest<ModelError>(j, "target")};
    return c;
}

json to_json(const Solution& s) {
    return json{{"challenge_id", s.challenge_id.hex()}, {"revealed_nonce", to_hex(s.revealed_nonce)}};
}

Solution solution_from_json(const json& j) {
    ju::expect_object<ModelError>(j, {"challenge_id", "revealed_nonce"}, "solution");
    return {ju::get_digest<ModelError>(j, "challenge_id"), ju::get_hex_bytes<ModelError>(j, "revealed_nonce")};
}

json payload_to_json(const TrailOpPayload& payload) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RequestPayload>) {
                return json{{"signature", p.signature.value.hex()}};
            } else if constexpr (std::is_same_v<T, Challenge>) {
                return to_json(p);
            } else if constexpr (std::is_same_v<T, Solution>) {
                return to_json(p);
            } else if constexpr (std::is_same_v<T, InvitePayload>) {
                return json{{"challenge", to_json(p.challenge)},
                            {"inviter", to_json(p.inviter)},
                            {"signature", p.signature.value.hex()}};
            } else {
                return json{{"remover", to_json(p.remover)}, {"signature", p.signature.value.hex()}};
            }
        },
        payload);
}

TrailOpPayload payload_from_json(TrailOpKind kind, const json& j, const Identity& subject) {
    switch (kind) {
        case TrailOpKind::kCreateRequest:
            ju::expect_object<ModelError>(j, {"signature"}, "request payload");
            return RequestPayload{signature_from_json(j, "signature", subject.public_key)};
        case TrailOpKind::kCreateChallenge:
            return challenge_from_json(j);
        case TrailOpKind::kCreateConfirm:
        case TrailOpKind::kMemberAccept:
            return solution_from_json(j);
        case TrailOpKind::kMemberInvite: {
            ju::expect_object<ModelError>(j, {"challenge", "inviter", "signature"}, "invite payload");
            InvitePayload p;
            p.challenge = challenge_from_json(j.at("challenge"));
            p.inviter = identity_from_json(j.at("inviter"));
            p.signature = signature_from_json(j, "signature", p.inviter.public_key);
            return p;
        }
        case TrailOpKind::kMemberRemove: {
            ju::expect_object<ModelError>(j, {"remover", "signature"}, "remove payload");
            RemovePayload p;
            p.remover = identity_from_json(j.at("remover"));
            p.signature = signature_from_json(j, "signature", p.remover.public_key);
            return p;
        }
    }
    throw ModelError("unknown trail op kind");
}

json to_json(const PackageRecord& r) {
    return json{{"package", pkgbuild::to_json(r.recipe)},
                {"publisher",
                 {{"name", r.publisher.name},
                  {"public_key", r.publisher.public_key.hex()},
                  {"signature", r.signature.value.hex()}}},
                {"submitted_at", r.submitted_at}};
}

PackageRecord package_from_json(const json& j) {
    ju::expect_object<ModelError>(j, {"package", "publisher", "submitted_at"}, "package record");
    PackageRecord r;
    try {
        r.recipe = pkgbuild::recipe_from_json(j.at("package"));
    } catch (const pkgbuild::ParseError& e) {
        throw ModelError(std::string("package: ") + e.what());
    }
    const json& pub = j.at("publisher");
    ju::expect_object<ModelError>(pub, {"name", "public_key", "signature"}, "publisher");
    r.publisher.name = ju::get_string<ModelError>(pub, "name");
    r.publisher.public_key = PublicKey{ju::get_digest<ModelError>(pub, "public_key")};
    r.signature = signature_from_json(pub, "signature", r.publisher.public_key);
    r.submitted_at = ju::get_int<ModelError>(j, "submitted_at");
    return r;
}

json to_json(const VouchRecord& v) {
    return json{{"member", to_json(v.member)},
                {"package_checksum", v.package_checksum.hex()},
                {"signature", v.signature.value.hex()},
                {"trail", v.trail_name}};
}

VouchRecord vouch_from_json(const json& j) {
    ju::expect_object<ModelError>(j, {"member", "package_checksum", "signature", "trail"}, "vouch");
    VouchRecord v;
    v.member = identity_from_json(j.at("member"));
    v.package_checksum = ju::get_digest<ModelError>(j, "package_checksum");
    v.signature = signature_from_json(j, "signature", v.member.public_key);
    v.trail_name = ju::get_string<ModelError>(j, "trail");
    return v;
}

PopularitySnapshot popularity_from_json(const json& j) {
    if (!j.is_array()) throw ModelError("popularity must be an array");
    PopularitySnapshot out;
    std::string previous;
    for (const auto& e : j) {
        ju::expect_object<ModelError>(e, {"name", "pop"}, "popularity entry");
        const std::string& name = ju::get_string<ModelError>(e, "name");
        if (!out.empty() && name <= previous) throw ModelError("popularity entries must be sorted and unique");
        out.emplace(name, ju::get_double<ModelError>(e, "pop"));
        previous = name;
    }
    return out;
}

json to_json(const ForgeMetadata& m) {
    json candidates = json::array();
    for (const auto& c : m.candidates) {
        candidates.push_back(json{{"popularity", c.popularity},
                                  {"public_key", c.identity.public_key.hex()},
                                  {"trails", c.trails},
                                  {"user", c.identity.name}});
    }
    return json{{"amount_of_packages", m.amount_of_packages},
                {"amount_of_valid_trails", m.amount_of_valid_trails},
                {"everybody_that_can_forge_this_block", std::move(candidates)},
                {"popularity_at_generation", popularity_to_json(m.popularity_at_generation)}};
}

ForgeMetadata metadata_from_json(const json& j) {
    ju::expect_object<ModelError>(j,
                                  {"amount_of_packages", "amount_of_valid_trails",
                                   "everybody_that_can_forge_this_block", "popularity_at_generation"},
                                  "metadata");
    ForgeMetadata m;
    m.amount_of_packages = ju::get_uint<ModelError>(j, "amount_of_packages");
    m.amount_of_valid_trails = ju::get_uint<ModelError>(j, "amount_of_valid_trails");
    const json& cands = j.at("everybody_that_can_forge_this_block");
    if (!cands.is_array()) throw ModelError("candidates must be an array");
    for (const auto& c : cands) {
        ju::expect_object<ModelError>(c, {"popularity", "public_key", "trails", "user"}, "forge candidate");
        ForgeCandidate fc;
        fc.popularity = ju::get_double<ModelError>(c, "popularity");
        fc.identity.public_key = PublicKey{ju::get_digest<ModelError>(c, "public_key")};
        fc.identity.name = ju::get_string<ModelError>(c, "user");
        fc.trails = ju::get_string_list<ModelError>(c, "trails");
        m.candidates.push_back(std::move(fc));
    }
    m.popularity_at_generation = popularity_from_json(j.at("popularity_at_generation"));
    return m;
}

json block_body(const Block& b) {
    json packages = json::array();
    for (const auto& p : b.packages) packages.push_back(to_json(p));
    json vouches = json::array();
    for (const auto& v : b.vouches) vouches.push_back(to_json(v));
    json ops = json::array();
    for (const auto& op : b.trail_ops) ops.push_back(to_json(op));
    json downloads = json::object();
    for (const auto& [trail, count] : b.downloads) downloads[trail] = count;

    return json{{"downloads", std::move(downloads)},
                {"forger", b.forger ? to_json(*b.forger) : json(nullptr)},
                {"metadata", to_json(b.metadata)},
                {"number", b.number},
                {"packages", std::move(packages)},
                {"popularity", popularity_to_json(b.popularity)},
                {"previous_hash", b.previous_hash.hex()},
                {"timestamp", b.timestamp},
                {"trails", std::move(ops)},
                {"vouches", std::move(vouches)}};
}

}  // namespace

std::string_view to_string(TrailOpKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<TrailOpKind> trail_op_kind_from_string(std::string_view s) {
    for (const auto& [k, name] : kKindNames) {
        if (name == s) return k;
    }
    return std::nullopt;
}

bool TrailOp::payload_matches_kind() const {
    switch (kind) {
        case TrailOpKind::kCreateRequest:
            return std::holds_alternative<RequestPayload>(payload);
        case TrailOpKind::kCreateChallenge:
            return std::holds_alternative<Challenge>(payload);
        case TrailOpKind::kCreateConfirm:
        case TrailOpKind::kMemberAccept:
            return std::holds_alternative<Solution>(payload);
        case TrailOpKind::kMemberInvite:
            return std::holds_alternative<InvitePayload>(payload);
        case TrailOpKind::kMemberRemove:
            return std::holds_alternative<RemovePayload>(payload);
    }
    return false;
}

Bytes vouch_message(const Digest& package_checksum, std::string_view trail_name) {
    return tagged("capivara/vouch", {package_checksum.view(), as_bytes(trail_name)});
}

Bytes request_message(std::string_view trail_name, const PublicKey& requester) {
    return tagged("capivara/trail-request", {requester.value().view(), as_bytes(trail_name)});
}

Bytes invite_message(std::string_view trail_name, const PublicKey& invitee, const Digest& challenge_id) {
    return tagged("capivara/trail-invite", {invitee.value().view(), challenge_id.view(), as_bytes(trail_name)});
}

Bytes remove_message(std::string_view trail_name, const PublicKey& target) {
    return tagged("capivara/trail-remove", {target.value().view(), as_bytes(trail_name)});
}

std::string canonical_dump(const nlohmann::json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

nlohmann::json to_json(const Identity& id) {
    return json{{"name", id.name}, {"public_key", id.public_key.hex()}};
}

Identity identity_from_json(const nlohmann::json& j) {
    ju::expect_object<ModelError>(j, {"name", "public_key"}, "identity");
    Identity id{ju::get_string<ModelError>(j, "name"), PublicKey{ju::get_digest<ModelError>(j, "public_key")}};
    if (id.name.empty()) throw ModelError("identity name must be non-empty");
    return id;
}

nlohmann::json to_json(const TrailOp& op) {
    return json{{"kind", std::string(to_string(op.kind))},
                {"payload", payload_to_json(op.payload)},
                {"subject", to_json(op.subject)},
                {"trail", op.trail_name}};
}

TrailOp trail_op_from_json(const nlohmann::json& j) {
    ju::expect_object<ModelError>(j, {"kind", "payload", "subject", "trail"}, "trail op");
    TrailOp op;
    auto kind = trail_op_kind_from_string(ju::get_string<ModelError>(j, "kind"));
    if (!kind) throw ModelError("unknown trail op kind '" + ju::get_string<ModelError>(j, "kind") + "'");
    op.kind = *kind;
    op.trail_name = ju::get_string<ModelError>(j, "trail");
    if (op.trail_name.empty()) throw ModelError("trail op with empty trail name");
    op.subject = identity_from_json(j.at("subject"));
    op.payload = payload_from_json(op.kind, j.at("payload"), op.subject);
    return op;
}

nlohmann::json popularity_to_json(const PopularitySnapshot& snapshot) {
    json out = json::array();
    for (const auto& [name, pop] : snapshot) out.push_back(json{{"name", name}, {"pop", pop}});
    return out;
}

std::vector<PopularityEntry> popularity_entries(const PopularitySnapshot& snapshot) {
    std::vector<PopularityEntry> out;
    out.reserve(snapshot.size());
    for (const auto& [name, pop] : snapshot) out.push_back({name, pop});
    return out;
}

std::string canonical_serialize(const Block& block) { return canonical_dump(block_body(block)); }

Digest block_digest(const Block& block) { return hash_bytes(canonical_serialize(block)); }

std::string serialize_block(const Block& block) {
    json j = block_body(block);
    j["hash"] = block.hash.hex();
    j["forger_signature"] = block.forger_signature ? json(block.forger_signature->value.hex()) : json(nullptr);
    return canonical_dump(j);
}

Block parse_block(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed block json: ") + e.what());
    }
    try {
        ju::expect_object<ModelError>(j,
                                      {"downloads", "forger", "forger_signature", "hash", "metadata", "number",
                                       "packages", "popularity", "previous_hash", "timestamp", "trails", "vouches"},
                                      "block");
        Block b;
        b.number = ju::get_uint<ModelError>(j, "number");
        b.timestamp = ju::get_int<ModelError>(j, "timestamp");
        b.previous_hash = ju::get_digest<ModelError>(j, "previous_hash");
        b.hash = ju::get_digest<ModelError>(j, "hash");

        const json& forger = j.at("forger");
        const json& forger_sig = j.at("forger_signature");
        if (!forger.is_null()) b.forger = identity_from_json(forger);
        if (!forger_sig.is_null()) {
            if (!b.forger) throw ModelError("forger_signature without forger");
            b.forger_signature = signature_from_json(j, "forger_signature", b.forger->public_key);
        }

        if (!j.at("packages").is_array() || !j.at("vouches").is_array() || !j.at("trails").is_array()) {
            throw ModelError("packages, vouches and trails must be arrays");
        }
        for (const auto& p : j.at("packages")) b.packages.push_back(package_from_json(p));
        for (const auto& v : j.at("vouches")) b.vouches.push_back(vouch_from_json(v));
        for (const auto& op : j.at("trails")) b.trail_ops.push_back(trail_op_from_json(op));

        const json& downloads = j.at("downloads");
        if (!downloads.is_object()) throw ModelError("downloads must be an object");
        for (const auto& [trail, count] : downloads.items()) {
            if (!count.is_number_integer()) throw ModelError("download counts must be integers");
            b.downloads.emplace(trail, count.get<std::int64_t>());
        }
        b.popularity = popularity_from_json(j.at("popularity"));
        b.metadata = metadata_from_json(j.at("metadata"));
        return b;
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed block: ") + e.what());
    } catch (const CryptoError& e) {
        throw ModelError(std::string("malformed block: ") + e.what());
    }
}

}  // namespace capivara
