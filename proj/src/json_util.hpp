// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

// Strict accessors for canonical JSON. Every parse path in the library goes
// through these so that a stored record either round-trips byte for byte or is
// rejected.

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "capivara/crypto.hpp"

namespace capivara::json_util {

using nlohmann::json;

template <typename Error>
void expect_object(const json& j, std::initializer_list<std::string_view> keys, std::string_view what) {
    if (!j.is_object()) throw Error(std::string(what) + ": expected object");
    if (j.size() != keys.size()) {
        throw Error(std::string(what) + ": expected " + std::to_string(keys.size()) + " fields, got " +
                    std::to_string(j.size()));
    }
    for (auto key : keys) {
        if (!j.contains(key)) throw Error(std::string(what) + ": missing field '" + std::string(key) + "'");
    }
}

template <typename Error>
const std::string& get_string(const json& j, std::string_view key) {
    const json& v = j.at(key);
    if (!v.is_string()) throw Error("field '" + std::string(key) + "' must be a string");
    return v.get_ref<const std::string&>();
}

template <typename Error>
std::int64_t get_int(const json& j, std::string_view key) {
    const json& v = j.at(key);
    if (v.is_number_unsigned()) {
        auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX)) throw Error("field '" + std::string(key) + "' out of range");
        return static_cast<std::int64_t>(u);
    }
    if (!v.is_number_integer()) throw Error("field '" + std::string(key) + "' must be an integer");
    return v.get<std::int64_t>();
}

template <typename Error>
std::uint64_t get_uint(const json& j, std::string_view key) {
    const json& v = j.at(key);
    if (!v.is_number_unsigned()) throw Error("field '" + std::string(key) + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

template <typename Error>
double get_double(const json& j, std::string_view key) {
    const json& v = j.at(key);
    if (!v.is_number_float()) throw Error("field '" + std::string(key) + "' must be a float");
    return v.get<double>();
}

template <typename Error>
Digest get_digest(const json& j, std::string_view key) {
    try {
        return Digest::from_hex(get_string<Error>(j, key));
    } catch (const CryptoError& e) {
        throw Error("field '" + std::string(key) + "': " + e.what());
    }
}

template <typename Error>
Bytes get_hex_bytes(const json& j, std::string_view key) {
    try {
        return bytes_from_hex(get_string<Error>(j, key));
    } catch (const CryptoError& e) {
        throw Error("field '" + std::string(key) + "': " + e.what());
    }
}

template <typename Error>
std::vector<std::string> get_string_list(const json& j, std::string_view key) {
    const json& v = j.at(key);
    if (!v.is_array()) throw Error("field '" + std::string(key) + "' must be an array");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& item : v) {
        if (!item.is_string()) throw Error("field '" + std::string(key) + "' must hold strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

}  // namespace capivara::json_util
