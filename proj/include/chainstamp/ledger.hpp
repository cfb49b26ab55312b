#pragma once

// Durable record of which document hashes went into which batch and
// transaction. Storage is an append-only JSON-lines log; the in-memory index
// is rebuilt from it on open.

#include "chainstamp/aggregator.hpp"
#include "chainstamp/chain.hpp"
#include "chainstamp/chain_store.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace chainstamp {

inline constexpr int kDefaultFinalityDepth = 5;
inline constexpr int kProofFormatVersion = 1;

enum class StampStatus { pending, committed, final };

std::string_view to_string(StampStatus status) noexcept;

struct StampRecord {
    Digest32 document_hash;
    WindowId window_id = 0;
    UtcSeconds received_at{};
    bool priority = false;
    StampStatus status = StampStatus::pending;

    // Set once committed.
    std::vector<Digest32> batch_hashes;
    std::optional<Digest32> aggregated_hash;
    std::optional<std::string> address;
    std::optional<Digest32> txid;

    // Live view, filled by lookup().
    int confirmations = 0;

    friend bool operator==(const StampRecord&, const StampRecord&) = default;
};

struct ProofBundle {
    int format_version = kProofFormatVersion;
    Digest32 document_hash;
    std::vector<Digest32> batch_hashes;
    Digest32 aggregated_hash;
    std::string address;
    Digest32 txid;
    Digest32 block_hash;
    std::int64_t block_height = 0;
    UtcSeconds block_time{};
    int confirmations_at_export = 0;

    /// Compact JSON with the field order of the external format.
    std::string to_json() const;

    /// Throws Error{invalid_payload} for malformed JSON, missing fields,
    /// wrong types or an unsupported format_version.
    static ProofBundle from_json(std::string_view text);

    friend bool operator==(const ProofBundle&, const ProofBundle&) = default;
};

/// A closed batch whose commitment has not been recorded yet.
struct PendingCommitment {
    CommitmentBatch batch;
    std::string address;
};

struct CommittedBatch {
    PendingCommitment commitment;
    Digest32 txid;
};

class LedgerStore {
public:
    /// An empty path keeps the store in memory only.
    explicit LedgerStore(std::filesystem::path log_path = {}, int finality_depth = kDefaultFinalityDepth);

    int finality_depth() const noexcept { return finality_depth_; }

    void record_submission(const SubmissionReceipt& receipt);

    /// Written before the commitment transaction is built, so a crash between
    /// window close and record_batch can be replayed.
    void record_batch_intent(const CommitmentBatch& batch, std::string_view address);

    /// The batch will not be committed; its hashes were requeued elsewhere.
    void record_batch_abandoned(const CommitmentBatch& batch);

    /// One committed record per batch hash. Returns the number of records
    /// that changed; replaying the same (batch, txid) returns 0.
    /// Throws inconsistent_address, unknown_transaction (txid neither pending
    /// nor mined), or invalid_payload (aggregated hash does not recompute).
    std::size_t record_batch(const CommitmentBatch& batch, const Digest32& txid, std::string_view address,
                             const ChainClient& chain);

    void mark_final(const Digest32& txid);

    /// Earliest final record if any, else the most recent one, with live
    /// status and confirmations. Throws not_found.
    StampRecord lookup(const Digest32& document_hash, const ChainClient& chain) const;

    std::vector<StampRecord> records_for(const Digest32& document_hash) const;

    /// Throws not_found, or not_yet_mined when no committed record has its
    /// transaction in a block.
    ProofBundle export_proof(const Digest32& document_hash, const Chain& chain) const;

    /// Submissions not covered by any batch (to requeue after a restart).
    std::vector<SubmissionReceipt> unbatched_submissions() const;

    /// Intents with neither a commitment nor an abandonment.
    std::vector<PendingCommitment> unfinished_batches() const;

    /// Committed batches whose transaction is not yet marked final.
    std::vector<CommittedBatch> unfinalized_commitments() const;

    /// Windows whose regular batch has been closed.
    std::vector<WindowId> closed_windows() const;

private:
    using RecordKey = std::pair<Digest32, WindowId>;
    using BatchKey = std::tuple<WindowId, Digest32, bool>;

    enum class BatchState { open, committed, abandoned };
    struct BatchEntry {
        PendingCommitment commitment;
        BatchState state = BatchState::open;
        std::optional<Digest32> txid;
    };

    void replay();
    void apply(const std::string& line);
    void append(const std::string& line);

    StampStatus live_status(const StampRecord& record, int confirmations) const;
    std::vector<StampRecord> records_for_locked(const Digest32& document_hash) const;

    std::filesystem::path path_;
    int finality_depth_;
    std::ofstream log_;
    mutable std::shared_mutex mutex_;
    std::map<RecordKey, StampRecord> records_;
    std::map<BatchKey, BatchEntry> batches_;
    std::set<Digest32> final_txids_;
};

} // namespace chainstamp
