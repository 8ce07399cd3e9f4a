// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "capivara/crypto.hpp"

namespace capivara::pkgbuild {

inline constexpr std::string_view kParserVersion = "regexp v1.0";

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ChecksumScheme { kNone, kMd5, kSha1, kSha256, kSha512 };

//! "sha256sums", "md5sums", ... ; empty for kNone.
std::string_view checksum_key(ChecksumScheme scheme);

struct PackageRecipe {
    std::string name;
    std::string version;
    std::int64_t release{1};
    std::string description;
    std::string url;
    std::vector<std::string> architectures;
    std::vector<std::string> licenses;
    std::vector<std::string> depends;
    std::vector<std::string> makedepends;
    std::vector<std::string> optdepends;
    std::vector<std::string> sources;
    ChecksumScheme checksum_scheme{ChecksumScheme::kNone};
    std::vector<std::string> checksums;
    std::vector<std::string> valid_pgp_keys;
    std::string parser_version{kParserVersion};

    //! Identity of the package: hash of the canonical form. Kept in sync by
    //! parse_pkgbuild and recipe_from_json; call refresh_checksum after edits.
    Digest checksum;

    void refresh_checksum();
    friend bool operator==(const PackageRecipe&, const PackageRecipe&) = default;
};

//! Parses the assignment subset of a PKGBUILD. Function bodies are skipped,
//! unknown keys ignored. Throws ParseError (missing pkgname/pkgver, bad quoting,
//! unbalanced braces, checksum/source count mismatch).
PackageRecipe parse_pkgbuild(std::string_view text);

//! Replaces $name and ${name} with bound values; unbound references stay verbatim.
std::string substitute_vars(std::string_view value, const std::map<std::string, std::string>& bindings);

//! Expands a single {a,b,...} group. No group yields the token itself.
//! Throws ParseError on unbalanced braces or more than one group.
std::vector<std::string> expand_braces(std::string_view token);

nlohmann::json to_json(const PackageRecipe& recipe);
//! Strict inverse of to_json; throws ParseError on unknown or missing keys.
PackageRecipe recipe_from_json(const nlohmann::json& j);
std::string canonical_recipe_bytes(const PackageRecipe& recipe);

}  // namespace capivara::pkgbuild
