// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

#include "capivara/crypto.hpp"

namespace capivara::pod {

inline constexpr std::size_t kDefaultChunkLength = 32;

class PodError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ChallengeRecord {
    Digest id;
    Digest package_checksum;
    std::string trail_name;
    std::size_t offset{0};
    std::size_t length{0};
    Digest expected_tampered_hash;
    bool solved{false};
};

struct Delivery {
    Bytes tampered;
    ChallengeRecord record;
};

//! Inserts `chunk_length` seeded random bytes at a seeded offset in [0, size].
//! Throws PodError for an empty package or a zero chunk length.
Delivery prepare_delivery(ByteView package, std::string_view trail_name, std::uint64_t seed,
                          std::size_t chunk_length = kDefaultChunkLength);

//! Removes [offset, offset + length). Throws PodError when out of range.
Bytes restore_package(ByteView tampered, std::size_t offset, std::size_t length);

struct Confirmed {
    std::size_t offset{0};
    std::size_t length{0};
};
struct Duplicate {};
struct Rejected {};
using ConfirmOutcome = std::variant<Confirmed, Duplicate, Rejected>;

struct DownloadSnapshot {
    std::map<std::string, std::int64_t> per_trail;
    std::int64_t t{0};
};

//! Volatile per-interval download counter. Single writer.
class DownloadLedger {
  public:
    //! Registers a delivery's challenge. Re-registering an id is a no-op.
    void open(const ChallengeRecord& record);

    ConfirmOutcome confirm(const Digest& challenge_id, const Digest& reported_hash);

    //! Adds `count` confirmations for a trail without per-delivery records. The
    //! simulator uses this for its synthetic download volume.
    void credit(const std::string& trail_name, std::int64_t count);

    //! Returns this interval's counts and zeroes them. Unsolved challenges opened
    //! before the previous snapshot are dropped.
    DownloadSnapshot snapshot_and_reset();

    [[nodiscard]] const std::map<std::string, std::int64_t>& interval_counts() const { return interval_; }
    [[nodiscard]] const std::map<std::string, std::int64_t>& cumulative_counts() const { return cumulative_; }
    [[nodiscard]] std::size_t open_challenges() const { return open_.size(); }

  private:
    struct Entry {
        ChallengeRecord record;
        std::uint64_t opened_in{0};
    };
    std::map<Digest, Entry> open_;
    std::map<std::string, std::int64_t> interval_;
    std::map<std::string, std::int64_t> cumulative_;
    std::uint64_t interval_index_{0};
};

}  // namespace capivara::pod
