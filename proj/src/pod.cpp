// Copyright 2026 The Capivara Authors
// SPDX-License-Identifier: Apache-2.0

#include "capivara/pod.hpp"

namespace capivara::pod {

Delivery prepare_delivery(ByteView package, std::string_view trail_name, std::uint64_t seed,
                          std::size_t chunk_length) {
    if (package.empty()) throw PodError("cannot deliver an empty package");
    if (chunk_length == 0) throw PodError("chunk length must be at least 1");

    const Digest checksum = hash_bytes(package);
    Rng rng = make_stream(Hasher{}.update(as_bytes("capivara/pod")).update(checksum.view()).update_u64(seed).finish());
    const auto offset = static_cast<std::size_t>(uniform_index(rng, package.size() + 1));

    Delivery d;
    d.tampered.reserve(package.size() + chunk_length);
    d.tampered.insert(d.tampered.end(), package.begin(), package.begin() + static_cast<std::ptrdiff_t>(offset));
    for (std::size_t i = 0; i < chunk_length; ++i) d.tampered.push_back(static_cast<std::uint8_t>(rng() & 0xff));
    d.tampered.insert(d.tampered.end(), package.begin() + static_cast<std::ptrdiff_t>(offset), package.end());

    d.record.package_checksum = checksum;
    d.record.trail_name = std::string(trail_name);
    d.record.offset = offset;
    d.record.length = chunk_length;
    d.record.expected_tampered_hash = hash_bytes(d.tampered);
    d.record.id = Hasher{}.update(checksum.view()).update_u64(offset).update_u64(seed).finish();
    return d;
}

Bytes restore_package(ByteView tampered, std::size_t offset, std::size_t length) {
    if (offset > tampered.size() || length > tampered.size() - offset) {
        throw PodError("chunk [" + std::to_string(offset) + ", +" + std::to_string(length) + ") outside " +
                       std::to_string(tampered.size()) + " bytes");
    }
    Bytes out(tampered.begin(), tampered.begin() + static_cast<std::ptrdiff_t>(offset));
    out.insert(out.end(), tampered.begin() + static_cast<std::ptrdiff_t>(offset + length), tampered.end());
    return out;
}

void DownloadLedger::open(const ChallengeRecord& record) {
    open_.try_emplace(record.id, Entry{record, interval_index_});
}

ConfirmOutcome DownloadLedger::confirm(const Digest& challenge_id, const Digest& reported_hash) {
    auto it = open_.find(challenge_id);
    if (it == open_.end()) return Rejected{};
    ChallengeRecord& r = it->second.record;
    if (r.solved) return Duplicate{};
    if (reported_hash != r.expected_tampered_hash) return Rejected{};
    r.solved = true;
    ++interval_[r.trail_name];
    ++cumulative_[r.trail_name];
    return Confirmed{r.offset, r.length};
}

void DownloadLedger::credit(const std::string& trail_name, std::int64_t count) {
    if (count < 0) throw PodError("negative download credit");
    interval_[trail_name] += count;
    cumulative_[trail_name] += count;
}

DownloadSnapshot DownloadLedger::snapshot_and_reset() {
    DownloadSnapshot s;
    for (auto& [trail, count] : interval_) {
        s.per_trail[trail] = count;
        s.t += count;
        count = 0;
    }
    // Solved records stay until expiry so a late resubmission reads as Duplicate.
    std::erase_if(open_, [&](const auto& kv) { return kv.second.opened_in < interval_index_; });
    ++interval_index_;
    return s;
}

}  // namespace capivara::pod
