#pragma once

// Commitment windows: submitted document hashes are collected per
// epoch-aligned half-open window [start, start + length) and folded into one
// aggregated hash when the window closes.

#include "chainstamp/digest.hpp"
#include "chainstamp/timeutil.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace chainstamp {

using WindowId = std::int64_t;
using Satoshi = std::int64_t;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr Satoshi kSatoshiPerBtc = 100'000'000;

struct SubmissionReceipt {
    Digest32 document_hash;
    UtcSeconds received_at;
    WindowId window_id = 0;
    bool priority = false;

    friend bool operator==(const SubmissionReceipt&, const SubmissionReceipt&) = default;
};

struct CommitmentBatch {
    WindowId window_id = 0;
    std::vector<Digest32> hashes; // sorted ascending, unique, non-empty
    Digest32 aggregated_hash;
    UtcSeconds created_at;
    bool priority = false;

    friend bool operator==(const CommitmentBatch&, const CommitmentBatch&) = default;
};

struct CostModel {
    Satoshi dust_satoshi = 1;
    Satoshi fee_satoshi = 10'000;
    Rational btc_price_usd = 0;
};

/// SHA-256 over the sorted, de-duplicated concatenation of the raw digests.
/// Throws Error{empty_input} for an empty input.
Digest32 aggregate(std::span<const Digest32> hashes);

/// Sorted unique copy of `hashes`.
std::vector<Digest32> canonical_hash_set(std::span<const Digest32> hashes);

/// Builds a batch over `hashes` (canonicalized). Throws empty_input.
CommitmentBatch make_batch(WindowId window, std::span<const Digest32> hashes, UtcSeconds created_at,
                           bool priority = false);

Satoshi annual_cost_satoshi(const CostModel& model, std::int64_t windows_per_year);
Rational annual_cost_btc(const CostModel& model, std::int64_t windows_per_year);
Rational annual_cost_usd(const CostModel& model, std::int64_t windows_per_year);

/// Parses a non-negative decimal such as "250" or "612.35" exactly.
Rational parse_decimal(std::string_view text);

class Aggregator {
public:
    explicit Aggregator(std::chrono::seconds window_length);

    std::chrono::seconds window_length() const noexcept { return length_; }
    WindowId window_of(UtcSeconds t) const noexcept;
    UtcSeconds window_start(WindowId id) const noexcept;
    UtcSeconds window_end(WindowId id) const noexcept;

    /// Idempotent per (hash, window). Submissions whose window was already
    /// closed land in the next open window. `created` reports whether the
    /// receipt is new.
    SubmissionReceipt submit_hash(const Digest32& hash, bool priority, UtcSeconds now, bool* created = nullptr);

    /// Queues every hash in one window under a single lock, so a concurrent
    /// close cannot split the set. `created[i]` reports whether receipt i is new.
    std::vector<SubmissionReceipt> submit_many(std::span<const Digest32> hashes, bool priority, UtcSeconds now,
                                               std::vector<bool>* created = nullptr);

    /// Throws window_still_open before the window has elapsed and
    /// window_already_closed on a second close. Returns nullopt for a window
    /// with no regular (non-priority) submissions.
    std::optional<CommitmentBatch> close_window(WindowId id, UtcSeconds now);

    /// Singleton batches for every priority submission not yet handed out.
    std::vector<CommitmentBatch> take_priority_batches(UtcSeconds now);

    /// Windows that have elapsed at `now` and hold queued hashes.
    std::vector<WindowId> closable_windows(UtcSeconds now) const;

    /// Puts the hashes of a batch that failed to commit back into the
    /// first open window at or after `now`.
    std::vector<SubmissionReceipt> requeue(const CommitmentBatch& batch, UtcSeconds now);

    /// Re-inserts a persisted receipt after a restart.
    void restore(const SubmissionReceipt& receipt);
    void mark_closed(WindowId id);

    std::optional<SubmissionReceipt> find(const Digest32& hash, WindowId id) const;
    std::size_t queued_count() const;

private:
    struct Window {
        std::map<Digest32, SubmissionReceipt> entries;
    };

    WindowId first_open_at_or_after(WindowId id) const;

    std::chrono::seconds length_;
    mutable std::mutex mutex_;
    std::map<WindowId, Window> open_;
    std::set<WindowId> closed_;
    std::vector<SubmissionReceipt> priority_queue_;
};

} // namespace chainstamp
