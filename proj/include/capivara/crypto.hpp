// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

struct evp_md_ctx_st;

namespace capivara {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

class CryptoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

//! A 256-bit value: sha256 output, public keys and signatures all share this width.
//! Text form is always 64 lowercase hex characters.
class Digest {
  public:
    static constexpr std::size_t kSize = 32;

    constexpr Digest() = default;
    explicit Digest(const std::array<std::uint8_t, kSize>& bytes) : bytes_{bytes} {}

    //! Strict parse: exactly 64 chars of [0-9a-f]. Throws CryptoError otherwise.
    static Digest from_hex(std::string_view hex);
    static Digest from_bytes(ByteView bytes);

    [[nodiscard]] std::string hex() const;
    [[nodiscard]] const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }
    [[nodiscard]] ByteView view() const { return {bytes_.data(), bytes_.size()}; }
    [[nodiscard]] bool is_zero() const;

    //! First eight bytes read little-endian; used to seed deterministic streams.
    [[nodiscard]] std::uint64_t prefix_u64() const;

    friend auto operator<=>(const Digest&, const Digest&) = default;

  private:
    std::array<std::uint8_t, kSize> bytes_{};
};

//! Lowercase hex of arbitrary bytes; bytes_from_hex is strict (even length, [0-9a-f]).
std::string to_hex(ByteView bytes);
Bytes bytes_from_hex(std::string_view hex);

Digest hash_bytes(ByteView data);
inline Digest hash_bytes(std::string_view data) { return hash_bytes(as_bytes(data)); }

//! Incremental sha256 for multi-part preimages.
class Hasher {
  public:
    Hasher();
    ~Hasher();
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;

    Hasher& update(ByteView data);
    Hasher& update(std::string_view data) { return update(as_bytes(data)); }
    Hasher& update(const Digest& d) { return update(d.view()); }
    Hasher& update_u64(std::uint64_t v);
    Digest finish();

  private:
    evp_md_ctx_st* ctx_;
};

class PrivateKey {
  public:
    //! Throws CryptoError unless exactly 32 bytes.
    explicit PrivateKey(ByteView bytes);
    explicit PrivateKey(const Digest& d) : value_{d} {}

    [[nodiscard]] const Digest& value() const { return value_; }
    friend auto operator<=>(const PrivateKey&, const PrivateKey&) = default;

  private:
    Digest value_;
};

class PublicKey {
  public:
    PublicKey() = default;
    explicit PublicKey(const Digest& d) : value_{d} {}

    [[nodiscard]] const Digest& value() const { return value_; }
    [[nodiscard]] std::string hex() const { return value_.hex(); }
    friend auto operator<=>(const PublicKey&, const PublicKey&) = default;

  private:
    Digest value_;
};

struct KeyPair {
    PrivateKey private_key;
    PublicKey public_key;
};

struct Signature {
    Digest value;
    PublicKey signer;

    friend bool operator==(const Signature&, const Signature&) = default;
};

//! Signing and sealing capability. Any scheme slotted in must give:
//! verify(m, sign(m, k), derive(k)) and open(k, seal(derive(k), p, c), c) == p.
class SignatureScheme {
  public:
    virtual ~SignatureScheme() = default;

    [[nodiscard]] virtual PublicKey derive_public(const PrivateKey& key) const = 0;
    [[nodiscard]] virtual Signature sign(ByteView message, const PrivateKey& key) const = 0;
    [[nodiscard]] virtual bool verify(ByteView message, const Signature& signature,
                                      const PublicKey& key) const = 0;

    //! Encrypts to the holder of `recipient`'s private key. `context` binds the
    //! keystream to one use. Throws CryptoError for keys the scheme cannot address.
    [[nodiscard]] virtual Bytes seal(const PublicKey& recipient, ByteView plaintext,
                                     ByteView context) const = 0;
    [[nodiscard]] virtual Bytes open(const PrivateKey& key, ByteView sealed, ByteView context) const = 0;
};

//! Deterministic hash-based stand-in for a real signature scheme.
//!
//! public_key = H("pub" | priv), signature = H("sign" | priv | m). Hash-derived keys
//! cannot be verified from the public half alone, so verification and sealing go
//! through a registry of enrolled private keys that only the simulation holds.
//! Unenrolled public keys never verify.
class MockSignatureScheme final : public SignatureScheme {
  public:
    KeyPair enroll(const PrivateKey& key);
    [[nodiscard]] bool is_enrolled(const PublicKey& key) const { return registry_.contains(key); }
    [[nodiscard]] std::size_t enrolled_count() const { return registry_.size(); }

    [[nodiscard]] PublicKey derive_public(const PrivateKey& key) const override;
    [[nodiscard]] Signature sign(ByteView message, const PrivateKey& key) const override;
    [[nodiscard]] bool verify(ByteView message, const Signature& signature,
                              const PublicKey& key) const override;
    [[nodiscard]] Bytes seal(const PublicKey& recipient, ByteView plaintext,
                             ByteView context) const override;
    [[nodiscard]] Bytes open(const PrivateKey& key, ByteView sealed, ByteView context) const override;

  private:
    std::map<PublicKey, PrivateKey> registry_;
};

// Challenge-response possession proof used for trail creation and invitations.

struct Challenge {
    Digest id;
    PublicKey target;
    Bytes sealed_nonce;
    Digest commitment;

    friend bool operator==(const Challenge&, const Challenge&) = default;
};

struct Solution {
    Digest challenge_id;
    Bytes revealed_nonce;

    friend bool operator==(const Solution&, const Solution&) = default;
};

inline constexpr std::size_t kNonceSize = 32;

Challenge make_challenge(const SignatureScheme& scheme, const PublicKey& target, std::uint64_t seed);
Solution solve_challenge(const SignatureScheme& scheme, const Challenge& challenge, const PrivateKey& key);
bool verify_solution(const Challenge& challenge, const Solution& solution);

// Seeded random streams. The engine is fully specified by the standard; the
// helpers below avoid std:: distributions, whose output is implementation-defined.

using Rng = std::mt19937_64;

//! Independent stream named `name` under `master_seed`.
Rng make_stream(std::uint64_t master_seed, std::string_view name);
inline Rng make_stream(const Digest& seed) { return Rng{seed.prefix_u64()}; }

//! Uniform in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
//! Uniform in [lo, hi] inclusive.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);
//! Uniform in [0, 1) with 53 bits of resolution.
double unit_interval(Rng& rng);

}  // namespace capivara
