// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "capivara/chain.hpp"
#include "test_support.hpp"

using namespace capivara;
using namespace capivara::chain;
using testsupport::World;

namespace {

bool has_rule(const ValidationReport& r, Rule rule) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

std::string rules_of(const ValidationReport& r) {
    std::string s;
    for (const auto& v : r.violations) s += std::to_string(rule_id(v.rule)) + ":" + v.message + "; ";
    return s;
}

// archlinux founded by "founder"; trail "t" founded by alice and confirmed at
// height 3; package "pkg" by alice published at height 4.
struct Scenario {
    World w;
    testsupport::Actor founder = w.actor("founder");
    testsupport::Actor alice = w.actor("alice");
    Chain chain = testsupport::bootstrap(w, "archlinux", founder);
    PackageRecord pkg;

    Scenario() {
        std::vector<TrailOp> ops;
        const Challenge c = w.create("t", alice, ops, 11);
        push({ops, {}, {}, {}});
        push({{w.confirm("t", alice, c)}, {}, {}, {}});
        pkg = w.package("pkg", "1.0", alice);
        push({{}, {pkg}, {}, {}});
    }

    void push(World::Contents c) {
        const auto report = chain.append(w.next_block(chain.state(), std::move(c)), w.scheme);
        if (!report.ok()) throw std::runtime_error("scenario: " + rules_of(report));
    }

    ValidationReport check(const Block& b) const { return validate_block(chain.state(), b, w.scheme); }
    Block next(World::Contents c = {}) const { return w.next_block(chain.state(), std::move(c)); }
};

}  // namespace

TEST(Genesis, MakeAndValidate) {
    World w;
    std::vector<TrailOp> ops;
    w.create("archlinux", w.actor("f"), ops);
    const Block g = make_genesis(1000, ops);
    EXPECT_EQ(g.number, 0u);
    EXPECT_TRUE(g.previous_hash.is_zero());
    EXPECT_FALSE(g.forger.has_value());
    ChainState s;
    EXPECT_TRUE(validate_genesis(g, w.scheme, &s).ok());
    EXPECT_EQ(s.registry.find("archlinux")->status, trails::TrailStatus::kChallengePending);
    EXPECT_THROW((void)make_genesis(0, ops), ChainError);

    Block bad = g;
    bad.previous_hash = hash_bytes(std::string_view("x"));
    bad.hash = block_digest(bad);
    EXPECT_TRUE(has_rule(validate_genesis(bad, w.scheme), Rule::kLinkage));
    bad = g;
    bad.packages.push_back(w.package("p", "1", w.actor("f")));
    bad.hash = block_digest(bad);
    EXPECT_FALSE(validate_genesis(bad, w.scheme).ok());
    EXPECT_THROW((void)Chain::from_genesis(bad, w.scheme), ChainError);
}

TEST(ValidateBlock, HonestScenarioIsValid) {
    Scenario s;
    EXPECT_EQ(s.chain.height(), 4u);
    EXPECT_TRUE(s.chain.state().published_packages.contains(s.pkg.recipe.checksum));
    const auto r = s.check(s.next({{}, {}, {s.w.vouch(s.pkg.recipe.checksum, "t", s.alice)}, {}}));
    EXPECT_TRUE(r.ok()) << rules_of(r);
}

TEST(ValidateBlock, LinkageRule) {
    Scenario s;
    Block b = s.next();
    b.previous_hash = hash_bytes(std::string_view("elsewhere"));
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kLinkage));
    b = s.next();
    b.number += 1;
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kLinkage));
    b = s.next();
    b.timestamp = s.chain.state().timestamp - 1;
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kLinkage));
}

TEST(ValidateBlock, DuplicateAppendRejected) {
    Scenario s;
    const Block b = s.next();
    EXPECT_TRUE(s.chain.append(b, s.w.scheme).ok());
    const auto again = s.chain.append(b, s.w.scheme);
    EXPECT_TRUE(has_rule(again, Rule::kLinkage));
    EXPECT_EQ(s.chain.height(), 5u);
}

TEST(ValidateBlock, PackageLimit) {
    Scenario s;
    World::Contents c;
    for (int i = 0; i < 101; ++i) c.packages.push_back(s.w.package("p" + std::to_string(i), "1", s.alice));
    EXPECT_TRUE(has_rule(s.check(s.next(c)), Rule::kLimits));
    c.packages.pop_back();
    const auto r = s.check(s.next(c));
    EXPECT_TRUE(r.ok()) << rules_of(r);
}

TEST(ValidateBlock, NewTrailLimit) {
    Scenario s;
    World::Contents c;
    for (int i = 0; i < 11; ++i) s.w.create("n" + std::to_string(i), s.w.actor("u" + std::to_string(i)), c.ops, i);
    EXPECT_TRUE(has_rule(s.check(s.next(c)), Rule::kLimits));
    c.ops.resize(20);
    const auto r = s.check(s.next(c));
    EXPECT_TRUE(r.ok()) << rules_of(r);
}

TEST(ValidateBlock, VouchRules) {
    Scenario s;
    const auto& cs = s.pkg.recipe.checksum;
    // Not a member.
    EXPECT_TRUE(has_rule(s.check(s.next({{}, {}, {s.w.vouch(cs, "t", s.founder)}, {}})), Rule::kVouch));
    // Unknown trail.
    EXPECT_TRUE(has_rule(s.check(s.next({{}, {}, {s.w.vouch(cs, "nope", s.alice)}, {}})), Rule::kVouch));
    // Package published in the same block.
    const auto fresh = s.w.package("fresh", "1", s.alice);
    EXPECT_TRUE(has_rule(s.check(s.next({{}, {fresh}, {s.w.vouch(fresh.recipe.checksum, "t", s.alice)}, {}})),
                         Rule::kVouch));
    // Signature by someone else.
    VouchRecord forged = s.w.vouch(cs, "t", s.alice);
    forged.signature = s.w.scheme.sign(vouch_message(cs, "t"), s.founder.key);
    EXPECT_TRUE(has_rule(s.check(s.next({{}, {}, {forged}, {}})), Rule::kVouch));
    // Tampered package record.
    PackageRecord p = s.w.package("p", "1", s.alice);
    p.recipe.version = "2";
    p.recipe.refresh_checksum();
    EXPECT_TRUE(has_rule(s.check(s.next({{}, {p}, {}, {}})), Rule::kVouch));
}

TEST(ValidateBlock, MemberSignatureRule) {
    Scenario s;
    TrailOp req = s.w.request("x", s.w.actor("bob"));
    std::get<RequestPayload>(req.payload).signature = s.w.scheme.sign(as_bytes("other"), s.w.key_of("bob"));
    World::Contents c;
    c.ops = {req, {TrailOpKind::kCreateChallenge, "x", req.subject, make_challenge(s.w.scheme, req.subject.public_key, 1)}};
    EXPECT_TRUE(has_rule(s.check(s.next(c)), Rule::kMemberSignature));

    auto [invite, ic] = s.w.invite("t", s.alice, s.w.actor("carol"));
    std::get<InvitePayload>(invite.payload).signature = s.w.scheme.sign(as_bytes("x"), s.alice.key);
    EXPECT_TRUE(has_rule(s.check(s.next({{invite}, {}, {}, {}})), Rule::kMemberSignature));
}

TEST(ValidateBlock, SolutionRule) {
    Scenario s;
    std::vector<TrailOp> ops;
    const auto bob = s.w.actor("bob");
    const Challenge c = s.w.create("x", bob, ops, 5);
    s.push({ops, {}, {}, {}});
    TrailOp confirm = s.w.confirm("x", bob, c);
    std::get<Solution>(confirm.payload).revealed_nonce[0] ^= 1;
    EXPECT_TRUE(has_rule(s.check(s.next({{confirm}, {}, {}, {}})), Rule::kSolution));
}

TEST(ValidateBlock, TrailStateRule) {
    World w;
    const auto founder = w.actor("founder");
    Chain ch = testsupport::bootstrap(w, "archlinux", founder);
    // Confirmed at height 1: the first invitation may appear at height 2, not earlier,
    // and the name is taken.
    auto [invite, ic] = w.invite("archlinux", founder, w.actor("m"));
    EXPECT_TRUE(validate_block(ch.state(), w.next_block(ch.state(), {{invite}, {}, {}, {}}), w.scheme).ok());
    std::vector<TrailOp> ops;
    w.create("archlinux", w.actor("squatter"), ops);
    EXPECT_TRUE(has_rule(validate_block(ch.state(), w.next_block(ch.state(), {ops, {}, {}, {}}), w.scheme),
                         Rule::kTrailState));
    TrailOp wrong = invite;
    wrong.kind = TrailOpKind::kMemberAccept;
    EXPECT_TRUE(has_rule(validate_block(ch.state(), w.next_block(ch.state(), {{wrong}, {}, {}, {}}), w.scheme),
                         Rule::kTrailState));
}

TEST(ValidateBlock, MemberOpsRejectedInConfirmBlock) {
    World w;
    const auto founder = w.actor("founder");
    std::vector<TrailOp> ops;
    const Challenge c = w.create("archlinux", founder, ops);
    Chain ch = Chain::from_genesis(make_genesis(1000, ops), w.scheme);
    auto [invite, ic] = w.invite("archlinux", founder, w.actor("m"));
    const auto r =
        validate_block(ch.state(), w.next_block(ch.state(), {{w.confirm("archlinux", founder, c), invite}, {}, {}, {}}),
                       w.scheme);
    EXPECT_TRUE(has_rule(r, Rule::kTrailState)) << rules_of(r);
}

TEST(ValidateBlock, ForgerRule) {
    Scenario s;
    Block b = s.next();
    b.forger = s.alice.id.name == b.forger->name ? s.founder.id : s.alice.id;
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kForger));

    b = s.next({{}, {}, {}, {{"archlinux", 10}, {"t", 30}}});
    EXPECT_TRUE(s.check(b).ok()) << rules_of(s.check(b));
    b.popularity["t"] += 1e-6;
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kForger));

    b = s.next({{}, {}, {}, {{"ghost", 10}}});
    EXPECT_TRUE(has_rule(s.check(b), Rule::kForger));

    b = s.next();
    b.metadata.amount_of_valid_trails += 1;
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kForger));

    b = s.next();
    b.metadata.candidates.pop_back();
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kForger));

    b = s.next();
    b.metadata.popularity_at_generation["t"] = 1;
    EXPECT_TRUE(has_rule(s.check(s.w.seal(b)), Rule::kForger));
}

TEST(ValidateBlock, IntegrityRule) {
    Scenario s;
    Block b = s.next();
    b.timestamp += 1;  // hash now stale
    EXPECT_TRUE(has_rule(s.check(b), Rule::kIntegrity));
    b = s.next();
    b.forger_signature = s.w.scheme.sign(b.hash.view(), b.forger->name == "alice" ? s.founder.key : s.alice.key);
    EXPECT_TRUE(has_rule(s.check(b), Rule::kIntegrity));
    b = s.next();
    b.forger_signature.reset();
    EXPECT_TRUE(has_rule(s.check(b), Rule::kIntegrity));
}

TEST(Lifecycle, HistoricalVouchesOfVacantTrailStillValidate) {
    Scenario s;
    const auto& cs = s.pkg.recipe.checksum;
    s.push({{}, {}, {s.w.vouch(cs, "t", s.alice)}, {}});
    s.push({{s.w.remove("t", s.alice, s.alice)}, {}, {}, {}});
    EXPECT_EQ(s.chain.state().registry.find("t")->status, trails::TrailStatus::kVacant);

    const auto full = verify_chain(s.chain.blocks(), s.w.scheme);
    EXPECT_TRUE(full.ok()) << rules_of(full);
    EXPECT_TRUE(has_rule(s.check(s.next({{}, {}, {s.w.vouch(cs, "t", s.alice)}, {}})), Rule::kVouch));

    // The name can be claimed again.
    std::vector<TrailOp> ops;
    const auto bob = s.w.actor("bob");
    const Challenge c = s.w.create("t", bob, ops, 77);
    s.push({ops, {}, {}, {}});
    s.push({{s.w.confirm("t", bob, c)}, {}, {}, {}});
    s.push({{}, {}, {s.w.vouch(cs, "t", bob)}, {}});
    EXPECT_TRUE(verify_chain(s.chain.blocks(), s.w.scheme).ok());
}

TEST(VerifyChain, StopsAtFirstInvalidBlock) {
    Scenario s;
    std::vector<Block> blocks = s.chain.blocks();
    blocks[2].timestamp += 5;
    const auto r = verify_chain(blocks, s.w.scheme);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.first_invalid_height, 2u);
    for (const auto& v : r.violations) EXPECT_EQ(v.height, 2u);
    EXPECT_FALSE(verify_chain(std::vector<Block>{}, s.w.scheme).ok());
}

TEST(VerifyChainLines, NonCanonicalLineRejected) {
    Scenario s;
    std::vector<std::string> lines;
    for (const auto& b : s.chain.blocks()) lines.push_back(serialize_block(b));
    ChainState final_state;
    EXPECT_TRUE(verify_chain_lines(lines, s.w.scheme, &final_state).ok());
    EXPECT_EQ(final_state.head, s.chain.head());

    auto spaced = lines;
    spaced[3] = nlohmann::json::parse(spaced[3]).dump(1);
    auto r = verify_chain_lines(spaced, s.w.scheme);
    EXPECT_EQ(r.first_invalid_height, 3u);
    EXPECT_TRUE(has_rule(r, Rule::kIntegrity));

    auto garbage = lines;
    garbage[1] = "{";
    r = verify_chain_lines(garbage, s.w.scheme);
    EXPECT_EQ(r.first_invalid_height, 1u);
}

TEST(ChooseHead, LongestValidThenLowestHash) {
    Scenario s;
    const auto base = s.chain.blocks();
    const ChainState& tip = s.chain.state();

    auto extend = [&](std::vector<Block> blocks, ChainState state, int n, Timestamp interval) {
        for (int i = 0; i < n; ++i) {
            Block b = s.w.next_block(state, {}, interval);
            ChainState next;
            if (!validate_block(state, b, s.w.scheme, &next).ok()) throw std::runtime_error("fork");
            blocks.push_back(b);
            state = next;
        }
        return blocks;
    };
    const auto longer = extend(base, tip, 2, 1200);
    const auto shorter = extend(base, tip, 1, 1300);
    const auto other = extend(base, tip, 1, 1400);
    std::vector<std::vector<Block>> candidates = {shorter, longer, other};
    EXPECT_EQ(choose_head(candidates, s.w.scheme), 1u);

    auto broken = extend(base, tip, 3, 1500);
    broken.back().timestamp += 1;
    candidates = {shorter, broken, longer};
    EXPECT_EQ(choose_head(candidates, s.w.scheme), 2u) << "invalid longer chain loses";

    candidates = {shorter, other};
    const std::size_t pick = choose_head(candidates, s.w.scheme);
    const Digest& low = std::min(shorter.back().hash, other.back().hash);
    EXPECT_EQ(candidates[pick].back().hash, low);
    std::reverse(candidates.begin(), candidates.end());
    EXPECT_EQ(candidates[choose_head(candidates, s.w.scheme)].back().hash, low);
}

TEST(ChooseHead, OrderIndependentOverPermutations) {
    Scenario s;
    const auto base = s.chain.blocks();
    std::vector<std::vector<Block>> forks;
    for (int i = 0; i < 4; ++i) {
        auto blocks = base;
        ChainState state = s.chain.state();
        for (int k = 0; k <= i % 2; ++k) {
            Block b = s.w.next_block(state, {}, 1200 + 10 * i);
            ChainState next;
            ASSERT_TRUE(validate_block(state, b, s.w.scheme, &next).ok());
            blocks.push_back(b);
            state = next;
        }
        forks.push_back(blocks);
    }
    const Digest expected = forks[choose_head(forks, s.w.scheme)].back().hash;
    std::vector<std::size_t> idx = {0, 1, 2, 3};
    do {
        std::vector<std::vector<Block>> perm;
        for (auto i : idx) perm.push_back(forks[i]);
        ASSERT_EQ(perm[choose_head(perm, s.w.scheme)].back().hash, expected);
    } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST(ChooseHead, Errors) {
    Scenario s;
    std::vector<std::vector<Block>> none;
    EXPECT_THROW((void)choose_head(none, s.w.scheme), std::invalid_argument);

    World w2;
    const Chain foreign = testsupport::bootstrap(w2, "other", w2.actor("x"));
    (void)s.w.actor("x");  // same derived key, so the foreign chain is otherwise valid
    std::vector<std::vector<Block>> mixed = {s.chain.blocks(), foreign.blocks()};
    EXPECT_THROW((void)choose_head(mixed, s.w.scheme), ChainError);

    auto bad = s.chain.blocks();
    bad[1].timestamp += 1;
    std::vector<std::vector<Block>> invalid = {bad};
    EXPECT_THROW((void)choose_head(invalid, s.w.scheme), ChainError);
}

// Every single-byte change to any stored block of a simulated chain makes that
// block the first invalid one.
TEST(MutationSweep, EveryByteOfTwentyBlockChain) {
    const auto result = testsupport::sweep_fixture_run();
    const auto& blocks = result.chain.blocks();
    ASSERT_EQ(blocks.size(), 20u);
    MockSignatureScheme scheme;
    sim::enroll_chain_identities(blocks, scheme);
    const auto outcome = testsupport::mutation_sweep(blocks, scheme);
    EXPECT_EQ(outcome.undetected, 0u) << outcome.first_problem;
    EXPECT_EQ(outcome.wrong_first_invalid, 0u);
    EXPECT_GT(outcome.mutations, 10000u);
}
