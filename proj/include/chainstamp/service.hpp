#pragma once

// The timestamping service without its transport: request handlers that
// take and return JSON text, the commitment scheduler, and crash recovery.
// HttpServer maps routes onto these handlers.

#include "chainstamp/aggregator.hpp"
#include "chainstamp/announce.hpp"
#include "chainstamp/chain_store.hpp"
#include "chainstamp/config.hpp"
#include "chainstamp/ledger.hpp"

#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

namespace chainstamp {

inline constexpr std::size_t kMaxBulkHashes = 10'000;

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// {"error":"<code>","detail":"<text>"}
ApiResponse error_response(int status, std::string_view code, std::string_view detail);

struct TickReport {
    std::size_t batches_committed = 0;
    std::size_t batches_failed = 0;
    std::size_t commitments_finalized = 0;
    std::vector<Digest32> txids;
};

class StampService {
public:
    /// Stages passed to the fault hook during a commitment cycle:
    /// "intent" (intent logged), "transaction" (transaction built),
    /// "recorded" (batch recorded, before mining).
    using FaultHook = std::function<void(std::string_view stage, const CommitmentBatch& batch)>;

    explicit StampService(ServiceConfig config, Clock clock = system_now);

    const ServiceConfig& config() const noexcept { return config_; }

    // JSON handlers. Request schemas admit digests only.
    ApiResponse handle_submit(std::string_view body);
    ApiResponse handle_bulk(std::string_view body);
    ApiResponse handle_status(std::string_view hash_hex) const;
    ApiResponse handle_proof(std::string_view hash_hex) const;
    ApiResponse handle_announcements(std::optional<std::string> since, std::optional<std::string> limit) const;
    ApiResponse handle_chain_info() const;
    ApiResponse handle_chain_headers(std::optional<std::string> from, std::optional<std::string> to) const;
    ApiResponse handle_chain_transaction(std::string_view txid_hex) const;
    ApiResponse handle_chain_export() const;
    ApiResponse handle_mine(std::string_view body);

    // Typed operations.
    SubmissionReceipt submit(const Digest32& hash, bool priority);
    std::vector<SubmissionReceipt> submit_bulk(std::span<const Digest32> hashes, bool priority);
    StampRecord status(const Digest32& hash) const;
    ProofBundle proof(const Digest32& hash) const;

    /// One scheduler pass: commit priority batches, close elapsed windows,
    /// then advance and finalize outstanding commitments.
    TickReport tick(UtcSeconds now);
    TickReport tick() { return tick(clock_()); }

    /// Calls tick() every tick_milliseconds until stop is requested.
    void run_scheduler(std::stop_token stop);

    /// Mines `count` blocks and finalizes whatever reached finality.
    std::vector<Block> mine(int count);

    void set_fault_hook(FaultHook hook);

    SimulatedChain& chain() noexcept { return chain_; }
    const SimulatedChain& chain() const noexcept { return chain_; }
    LedgerStore& ledger() noexcept { return ledger_; }
    const LedgerStore& ledger() const noexcept { return ledger_; }
    const Aggregator& aggregator() const noexcept { return aggregator_; }
    Announcer& announcer() noexcept { return announcer_; }

private:
    void recover();
    void commit(const CommitmentBatch& batch, UtcSeconds now, TickReport& report);
    void finish_commit(const CommitmentBatch& batch, const std::string& address, UtcSeconds now,
                       TickReport& report);
    void advance_commitments(UtcSeconds now, TickReport& report);
    void fault(std::string_view stage, const CommitmentBatch& batch);

    ServiceConfig config_;
    Clock clock_;
    SimulatedChain chain_;
    LedgerStore ledger_;
    Aggregator aggregator_;
    Announcer announcer_;
    std::mutex submit_mutex_;
    std::mutex tick_mutex_;
    FaultHook fault_hook_;
};

} // namespace chainstamp
