// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <random>

#include "capivara/pkgbuild.hpp"
#include "test_support.hpp"

using namespace capivara::pkgbuild;

namespace {

std::vector<std::string> bash_words(const std::string& token) {
    const std::string cmd = "bash -c 'for w in " + token + "; do printf \"%s\\n\" \"$w\"; done'";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return {};
    std::vector<std::string> out;
    char buf[512];
    while (std::fgets(buf, sizeof buf, p)) {
        std::string s(buf);
        if (!s.empty() && s.back() == '\n') s.pop_back();
        out.push_back(s);
    }
    pclose(p);
    return out;
}

}  // namespace

TEST(Pkgbuild, OpensshRecipeFields) {
    const auto r = parse_pkgbuild(testsupport::read_file(testsupport::fixture("openssh.PKGBUILD")));
    EXPECT_EQ(r.name, "openssh");
    EXPECT_EQ(r.version, "7.9p1");
    EXPECT_EQ(r.release, 1);
    EXPECT_EQ(r.description, "Premier connectivity tool for remote login with the SSH protocol");
    EXPECT_EQ(r.url, "https://www.openssh.com/portable.html");
    EXPECT_EQ(r.licenses, (std::vector<std::string>{"custom:BSD"}));
    EXPECT_EQ(r.architectures, (std::vector<std::string>{"x86_64"}));
    EXPECT_EQ(r.depends, (std::vector<std::string>{"krb5", "openssl", "libedit", "ldns"}));
    EXPECT_EQ(r.makedepends, (std::vector<std::string>{"linux-headers"}));
    EXPECT_EQ(r.optdepends,
              (std::vector<std::string>{"xorg-xauth: X11 forwarding", "x11-ssh-askpass: input passphrase in X"}));
    EXPECT_EQ(r.valid_pgp_keys, (std::vector<std::string>{"59C2118ED206D927E667EBE3D3E5F56B6D920D30"}));
    ASSERT_EQ(r.sources.size(), 8u);
    EXPECT_EQ(r.sources[0], "https://ftp.openbsd.org/pub/OpenBSD/OpenSSH/portable/openssh-7.9p1.tar.gz");
    EXPECT_EQ(r.sources[1], "https://ftp.openbsd.org/pub/OpenBSD/OpenSSH/portable/openssh-7.9p1.tar.gz.asc");
    EXPECT_EQ(r.sources[7], "sshd.pam");
    EXPECT_EQ(r.checksum_scheme, ChecksumScheme::kSha256);
    ASSERT_EQ(r.checksums.size(), 8u);
    EXPECT_EQ(r.checksums[0], "6b4b3ba2253d84ed3771c8050728d597c91cfce898713beb7b64a305b6f11aad");
    EXPECT_EQ(r.checksums[1], "SKIP");
    EXPECT_EQ(r.checksums[7], "64576021515c0a98b0aaf0a0ae02e0f5ebe8ee525b1e647ab68f369f81ecd846");
    EXPECT_EQ(r.parser_version, "regexp v1.0");
    EXPECT_FALSE(r.checksum.is_zero());
}

TEST(Pkgbuild, JsonRoundTripIsStrict) {
    const auto r = parse_pkgbuild(testsupport::read_file(testsupport::fixture("openssh.PKGBUILD")));
    EXPECT_EQ(recipe_from_json(to_json(r)), r);
    auto j = to_json(r);
    j["surprise"] = 1;
    EXPECT_THROW((void)recipe_from_json(j), ParseError);
    j = to_json(r);
    j.erase("pkgver");
    EXPECT_THROW((void)recipe_from_json(j), ParseError);
}

TEST(Pkgbuild, ChecksumTracksContent) {
    const auto a = parse_pkgbuild("pkgname=a\npkgver=1\n");
    const auto b = parse_pkgbuild("pkgname=a\npkgver=2\n");
    EXPECT_NE(a.checksum, b.checksum);
    EXPECT_EQ(a.checksum, parse_pkgbuild("# comment\npkgname='a'\npkgver=\"1\"\n").checksum);
}

TEST(Substitution, BoundAndUnboundReferences) {
    const std::map<std::string, std::string> b = {{"pkgname", "bzr"}, {"pkgver", "1.3"}};
    EXPECT_EQ(substitute_vars("$pkgname-${pkgver}.tar.gz", b), "bzr-1.3.tar.gz");
    EXPECT_EQ(substitute_vars("${missing}/$nope", b), "${missing}/$nope");
    EXPECT_EQ(substitute_vars("cost $", b), "cost $");
    EXPECT_EQ(substitute_vars("$pkgname_suffix", b), "$pkgname_suffix");
}

TEST(Substitution, SingleQuotesAreLiteral) {
    const auto r = parse_pkgbuild("pkgname=x\npkgver=1\npkgdesc='costs $pkgname'\nurl=\"http://$pkgname.org\"\n");
    EXPECT_EQ(r.description, "costs $pkgname");
    EXPECT_EQ(r.url, "http://x.org");
}

TEST(Braces, AgreeWithBash) {
    const std::vector<std::string> tokens = {
        "file{,.asc}", "x{a,b}y", "{a,b}", "pre{,1,22}", "plain", "{a}", "a{b}c", "x{,}", "{,x}end", "v{1,2,3,4}.sig"};
    for (const auto& t : tokens) {
        const auto expected = bash_words(t);
        ASSERT_FALSE(expected.empty()) << "bash unavailable for " << t;
        EXPECT_EQ(expand_braces(t), expected) << t;
    }
}

TEST(Braces, MalformedGroupsThrow) {
    EXPECT_THROW((void)expand_braces("a{b,c"), ParseError);
    EXPECT_THROW((void)expand_braces("a}b"), ParseError);
    EXPECT_THROW((void)expand_braces("{a,b}{c,d}"), ParseError);
    EXPECT_THROW((void)expand_braces("{a,{b,c}}"), ParseError);
}

TEST(Pkgbuild, ErrorsAreParseErrors) {
    EXPECT_THROW((void)parse_pkgbuild("pkgver=1\n"), ParseError);
    EXPECT_THROW((void)parse_pkgbuild("pkgname=a\n"), ParseError);
    EXPECT_THROW((void)parse_pkgbuild("pkgname='a\npkgver=1\n"), ParseError);
    EXPECT_THROW((void)parse_pkgbuild("pkgname=a\npkgver=1\nsource=(a b\n"), ParseError);
    EXPECT_THROW((void)parse_pkgbuild("pkgname=a\npkgver=1\npkgrel=x\n"), ParseError);
    EXPECT_THROW((void)parse_pkgbuild("pkgname=a\npkgver=1\nsource=(a b)\nmd5sums=(1)\n"), ParseError);
}

TEST(Pkgbuild, FunctionBodiesAndUnknownKeysIgnored) {
    const auto r = parse_pkgbuild(
        "pkgname=a\npkgver=1\nfoo=bar\npackage() {\n  pkgname=evil\n  if true; then { echo; }; fi\n}\n");
    EXPECT_EQ(r.name, "a");
}

TEST(Pkgbuild, FuzzedInputOnlyEverThrowsParseError) {
    const std::string base = testsupport::read_file(testsupport::fixture("openssh.PKGBUILD"));
    std::mt19937_64 g(31);
    const std::string alphabet = "(){}'\"$=\n #\\,abc";
    int parsed = 0;
    for (int i = 0; i < 3000; ++i) {
        std::string s = base;
        const int edits = 1 + static_cast<int>(g() % 8);
        for (int e = 0; e < edits; ++e) {
            const std::size_t pos = g() % s.size();
            switch (g() % 3) {
                case 0:
                    s[pos] = alphabet[g() % alphabet.size()];
                    break;
                case 1:
                    s.insert(pos, 1, alphabet[g() % alphabet.size()]);
                    break;
                default:
                    s.erase(pos, 1 + g() % 10);
                    break;
            }
            if (s.empty()) s = "x";
        }
        try {
            (void)parse_pkgbuild(s);
            ++parsed;
        } catch (const ParseError&) {
        }
    }
    EXPECT_GT(parsed, 0);
}
