// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/crypto.hpp"

#include <openssl/evp.h>

#include <algorithm>

namespace capivara {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

Digest keystream(const PrivateKey& key, ByteView context) {
    return Hasher{}.update("capivara/seal").update(key.value()).update(context).finish();
}

Bytes xor_with(ByteView data, const Digest& stream) {
    if (data.size() > Digest::kSize) {
        throw CryptoError("sealed payload longer than keystream");
    }
    Bytes out(data.begin(), data.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= stream.bytes()[i];
    return out;
}

}  // namespace

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != kSize * 2) {
        throw CryptoError("digest hex must be 64 characters, got " + std::to_string(hex.size()));
    }
    return from_bytes(bytes_from_hex(hex));
}

Digest Digest::from_bytes(ByteView bytes) {
    if (bytes.size() != kSize) throw CryptoError("digest must be 32 bytes");
    std::array<std::uint8_t, kSize> out{};
    std::copy(bytes.begin(), bytes.end(), out.begin());
    return Digest{out};
}

std::string Digest::hex() const { return to_hex(view()); }

std::string to_hex(ByteView bytes) {
    std::string out(bytes.size() * 2, '0');
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        out[2 * i] = kHexDigits[bytes[i] >> 4];
        out[2 * i + 1] = kHexDigits[bytes[i] & 0x0f];
    }
    return out;
}

Bytes bytes_from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw CryptoError("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw CryptoError("invalid lowercase hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

bool Digest::is_zero() const {
    return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

std::uint64_t Digest::prefix_u64() const {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes_[static_cast<std::size_t>(i)];
    return v;
}

Hasher::Hasher() : ctx_{EVP_MD_CTX_new()} {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx_);
        throw CryptoError("sha256 init failed");
    }
}

Hasher::~Hasher() { EVP_MD_CTX_free(ctx_); }

Hasher& Hasher::update(ByteView data) {
    if (!data.empty()) EVP_DigestUpdate(ctx_, data.data(), data.size());
    return *this;
}

Hasher& Hasher::update_u64(std::uint64_t v) {
    std::array<std::uint8_t, 8> le{};
    for (std::size_t i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return update(ByteView{le.data(), le.size()});
}

Digest Hasher::finish() {
    std::array<std::uint8_t, Digest::kSize> out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, out.data(), &len);
    return Digest{out};
}

Digest hash_bytes(ByteView data) { return Hasher{}.update(data).finish(); }

PrivateKey::PrivateKey(ByteView bytes) {
    if (bytes.size() != Digest::kSize) {
        throw CryptoError("private key must be 32 bytes, got " + std::to_string(bytes.size()));
    }
    value_ = Digest::from_bytes(bytes);
}

KeyPair MockSignatureScheme::enroll(const PrivateKey& key) {
    PublicKey pub = derive_public(key);
    registry_.insert_or_assign(pub, key);
    return {key, pub};
}

PublicKey MockSignatureScheme::derive_public(const PrivateKey& key) const {
    return PublicKey{Hasher{}.update("capivara/pub").update(key.value()).finish()};
}

Signature MockSignatureScheme::sign(ByteView message, const PrivateKey& key) const {
    Digest value = Hasher{}.update("capivara/sign").update(key.value()).update(message).finish();
    return {value, derive_public(key)};
}

bool MockSignatureScheme::verify(ByteView message, const Signature& signature,
                                 const PublicKey& key) const {
    if (signature.signer != key) return false;
    auto it = registry_.find(key);
    if (it == registry_.end()) return false;
    return sign(message, it->second).value == signature.value;
}

Bytes MockSignatureScheme::seal(const PublicKey& recipient, ByteView plaintext, ByteView context) const {
    auto it = registry_.find(recipient);
    if (it == registry_.end()) throw CryptoError("cannot seal to unenrolled key " + recipient.hex());
    return xor_with(plaintext, keystream(it->second, context));
}

Bytes MockSignatureScheme::open(const PrivateKey& key, ByteView sealed, ByteView context) const {
    return xor_with(sealed, keystream(key, context));
}

Challenge make_challenge(const SignatureScheme& scheme, const PublicKey& target, std::uint64_t seed) {
    const Digest nonce = Hasher{}.update("capivara/nonce").update(target.value()).update_u64(seed).finish();
    Challenge c;
    c.target = target;
    c.commitment = hash_bytes(nonce.view());
    c.sealed_nonce = scheme.seal(target, nonce.view(), c.commitment.view());
    c.id = Hasher{}.update("capivara/challenge").update(target.value()).update(c.commitment).finish();
    return c;
}

Solution solve_challenge(const SignatureScheme& scheme, const Challenge& challenge, const PrivateKey& key) {
    return {challenge.id, scheme.open(key, challenge.sealed_nonce, challenge.commitment.view())};
}

bool verify_solution(const Challenge& challenge, const Solution& solution) {
    return solution.challenge_id == challenge.id && hash_bytes(solution.revealed_nonce) == challenge.commitment;
}

Rng make_stream(std::uint64_t master_seed, std::string_view name) {
    return Rng{Hasher{}.update("capivara/stream/").update(name).update_u64(master_seed).finish().prefix_u64()};
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
    // Rejection keeps the draw unbiased: accept only below the largest multiple of n.
    const std::uint64_t limit = Rng::max() - (Rng::max() % n);
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int with lo > hi");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(uniform_index(rng, span));
}

double unit_interval(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

}  // namespace capivara
