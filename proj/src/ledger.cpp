#include "chainstamp/ledger.hpp"

#include "chainstamp/address.hpp"
#include "chainstamp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <mutex>
#include <sstream>

namespace chainstamp {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(StampStatus status) noexcept
{
    switch (status) {
    case StampStatus::pending: return "pending";
    case StampStatus::committed: return "committed";
    case StampStatus::final: return "final";
    }
    return "unknown";
}

namespace {

json hashes_to_json(std::span<const Digest32> hashes)
{
    json arr = json::array();
    for (const auto& h : hashes) arr.push_back(h.hex());
    return arr;
}

std::vector<Digest32> hashes_from_json(const json& arr)
{
    std::vector<Digest32> out;
    for (const auto& v : arr) out.push_back(Digest32::from_hex(v.get<std::string>()));
    return out;
}

json batch_to_json(const CommitmentBatch& batch)
{
    return {{"window_id", batch.window_id},
            {"priority", batch.priority},
            {"created_at", unix_seconds(batch.created_at)},
            {"batch_hashes", hashes_to_json(batch.hashes)},
            {"aggregated_hash", batch.aggregated_hash.hex()}};
}

CommitmentBatch batch_from_json(const json& j)
{
    CommitmentBatch batch;
    batch.window_id = j.at("window_id").get<WindowId>();
    batch.priority = j.at("priority").get<bool>();
    batch.created_at = utc_from_unix(j.at("created_at").get<std::int64_t>());
    batch.hashes = hashes_from_json(j.at("batch_hashes"));
    batch.aggregated_hash = Digest32::from_hex(j.at("aggregated_hash").get<std::string>());
    return batch;
}

} // namespace

// --- ProofBundle --------------------------------------------------------------

std::string ProofBundle::to_json() const
{
    ordered_json j;
    j["format_version"] = format_version;
    j["document_hash"] = document_hash.hex();
    j["batch_hashes"] = ordered_json::array();
    for (const auto& h : batch_hashes) j["batch_hashes"].push_back(h.hex());
    j["aggregated_hash"] = aggregated_hash.hex();
    j["address"] = address;
    j["txid"] = txid.hex();
    j["block_hash"] = block_hash.hex();
    j["block_height"] = block_height;
    j["block_time"] = format_rfc3339(block_time);
    j["confirmations_at_export"] = confirmations_at_export;
    return j.dump();
}

ProofBundle ProofBundle::from_json(std::string_view text)
{
    try {
        const json j = json::parse(text);
        ProofBundle b;
        b.format_version = j.at("format_version").get<int>();
        if (b.format_version != kProofFormatVersion)
            throw Error(ErrorCode::invalid_payload,
                        "unsupported proof format_version " + std::to_string(b.format_version));
        b.document_hash = Digest32::from_hex(j.at("document_hash").get<std::string>());
        b.batch_hashes = hashes_from_json(j.at("batch_hashes"));
        b.aggregated_hash = Digest32::from_hex(j.at("aggregated_hash").get<std::string>());
        b.address = j.at("address").get<std::string>();
        b.txid = Digest32::from_hex(j.at("txid").get<std::string>());
        b.block_hash = Digest32::from_hex(j.at("block_hash").get<std::string>());
        b.block_height = j.at("block_height").get<std::int64_t>();
        b.block_time = parse_rfc3339(j.at("block_time").get<std::string>());
        b.confirmations_at_export = j.at("confirmations_at_export").get<int>();
        return b;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_payload, std::string("malformed proof bundle: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_payload) throw;
        throw Error(ErrorCode::invalid_payload, std::string("malformed proof bundle: ") + e.what());
    }
}

// --- LedgerStore ----------------------------------------------------------------

LedgerStore::LedgerStore(std::filesystem::path log_path, int finality_depth)
    : path_(std::move(log_path)), finality_depth_(finality_depth)
{
    if (finality_depth_ < 1) throw Error(ErrorCode::config_error, "finality_depth must be at least 1");
    if (path_.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    replay();
    log_.open(path_, std::ios::app);
    if (!log_) throw Error(ErrorCode::io_error, "cannot open ledger log " + path_.string());
}

void LedgerStore::replay()
{
    if (!std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    // A crash mid-append leaves a partial last line; drop it.
    const auto last_newline = content.rfind('\n');
    const std::size_t complete = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (complete != content.size()) {
        content.resize(complete);
        std::filesystem::resize_file(path_, complete);
    }

    std::istringstream lines(content);
    std::string line;
    std::size_t number = 0;
    while (std::getline(lines, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            apply(line);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::corrupt_record,
                        "ledger log " + path_.string() + " line " + std::to_string(number) + ": " + e.what());
        }
    }
}

void LedgerStore::append(const std::string& line)
{
    apply(line);
    if (log_.is_open()) {
        log_ << line << '\n';
        log_.flush();
        if (!log_) throw Error(ErrorCode::io_error, "cannot append to ledger log " + path_.string());
    }
}

void LedgerStore::apply(const std::string& line)
{
    const json j = json::parse(line);
    const std::string type = j.at("type").get<std::string>();

    if (type == "submitted") {
        StampRecord r;
        r.document_hash = Digest32::from_hex(j.at("document_hash").get<std::string>());
        r.window_id = j.at("window_id").get<WindowId>();
        r.received_at = utc_from_unix(j.at("received_at").get<std::int64_t>());
        r.priority = j.at("priority").get<bool>();
        records_.try_emplace({r.document_hash, r.window_id}, std::move(r));
    } else if (type == "batch_intent") {
        CommitmentBatch batch = batch_from_json(j);
        BatchKey key{batch.window_id, batch.aggregated_hash, batch.priority};
        batches_.try_emplace(key, BatchEntry{{std::move(batch), j.at("address").get<std::string>()}, BatchState::open, std::nullopt});
    } else if (type == "batch_abandoned") {
        const CommitmentBatch batch = batch_from_json(j);
        auto& entry = batches_[{batch.window_id, batch.aggregated_hash, batch.priority}];
        entry.commitment.batch = batch;
        entry.state = BatchState::abandoned;
        for (const auto& h : batch.hashes) {
            auto it = records_.find({h, batch.window_id});
            if (it != records_.end() && it->second.status == StampStatus::pending) records_.erase(it);
        }
    } else if (type == "committed") {
        const CommitmentBatch batch = batch_from_json(j);
        const std::string address = j.at("address").get<std::string>();
        const Digest32 txid = Digest32::from_hex(j.at("txid").get<std::string>());
        auto& entry = batches_[{batch.window_id, batch.aggregated_hash, batch.priority}];
        entry.commitment = {batch, address};
        entry.state = BatchState::committed;
        entry.txid = txid;
        for (const auto& h : batch.hashes) {
            auto [it, inserted] = records_.try_emplace({h, batch.window_id});
            StampRecord& r = it->second;
            if (inserted) {
                r.document_hash = h;
                r.window_id = batch.window_id;
                r.received_at = batch.created_at;
                r.priority = batch.priority;
            }
            r.status = StampStatus::committed;
            r.batch_hashes = batch.hashes;
            r.aggregated_hash = batch.aggregated_hash;
            r.address = address;
            r.txid = txid;
        }
    } else if (type == "final") {
        final_txids_.insert(Digest32::from_hex(j.at("txid").get<std::string>()));
    } else {
        throw Error(ErrorCode::corrupt_record, "unknown ledger entry type '" + type + "'");
    }
}

void LedgerStore::record_submission(const SubmissionReceipt& receipt)
{
    std::unique_lock lock(mutex_);
    if (records_.contains({receipt.document_hash, receipt.window_id})) return;
    append(json{{"type", "submitted"},
                {"document_hash", receipt.document_hash.hex()},
                {"window_id", receipt.window_id},
                {"received_at", unix_seconds(receipt.received_at)},
                {"priority", receipt.priority}}
               .dump());
}

void LedgerStore::record_batch_intent(const CommitmentBatch& batch, std::string_view address)
{
    std::unique_lock lock(mutex_);
    if (batches_.contains({batch.window_id, batch.aggregated_hash, batch.priority})) return;
    json j = batch_to_json(batch);
    j["type"] = "batch_intent";
    j["address"] = std::string(address);
    append(j.dump());
}

void LedgerStore::record_batch_abandoned(const CommitmentBatch& batch)
{
    std::unique_lock lock(mutex_);
    json j = batch_to_json(batch);
    j["type"] = "batch_abandoned";
    append(j.dump());
}

std::size_t LedgerStore::record_batch(const CommitmentBatch& batch, const Digest32& txid,
                                      std::string_view address, const ChainClient& chain)
{
    if (batch.hashes.empty() || aggregate(batch.hashes) != batch.aggregated_hash)
        throw Error(ErrorCode::invalid_payload, "batch aggregated hash does not recompute from its hashes");
    const BitcoinAddress parsed = parse_address(address);
    if (derive_address(batch.aggregated_hash, parsed.version).encoded != address)
        throw Error(ErrorCode::inconsistent_address,
                    "address " + std::string(address) + " is not derived from aggregated hash " +
                        batch.aggregated_hash.hex());
    if (!chain.get_transaction(txid))
        throw Error(ErrorCode::unknown_transaction, "transaction " + txid.hex() + " is neither pending nor mined");

    std::unique_lock lock(mutex_);
    std::size_t changed = 0;
    for (const auto& h : batch.hashes) {
        auto it = records_.find({h, batch.window_id});
        if (it == records_.end() || it->second.status == StampStatus::pending || it->second.txid != txid) ++changed;
    }
    if (changed == 0) return 0;

    json j = batch_to_json(batch);
    j["type"] = "committed";
    j["address"] = std::string(address);
    j["txid"] = txid.hex();
    append(j.dump());
    return changed;
}

void LedgerStore::mark_final(const Digest32& txid)
{
    std::unique_lock lock(mutex_);
    if (final_txids_.contains(txid)) return;
    append(json{{"type", "final"}, {"txid", txid.hex()}}.dump());
}

StampStatus LedgerStore::live_status(const StampRecord& record, int confirmations) const
{
    if (!record.txid) return StampStatus::pending;
    if (final_txids_.contains(*record.txid) || confirmations >= finality_depth_) return StampStatus::final;
    return StampStatus::committed;
}

std::vector<StampRecord> LedgerStore::records_for_locked(const Digest32& document_hash) const
{
    std::vector<StampRecord> out;
    for (auto it = records_.lower_bound({document_hash, std::numeric_limits<WindowId>::min()});
         it != records_.end() && it->first.first == document_hash; ++it)
        out.push_back(it->second);
    return out;
}

std::vector<StampRecord> LedgerStore::records_for(const Digest32& document_hash) const
{
    std::shared_lock lock(mutex_);
    return records_for_locked(document_hash);
}

StampRecord LedgerStore::lookup(const Digest32& document_hash, const ChainClient& chain) const
{
    std::shared_lock lock(mutex_);
    auto records = records_for_locked(document_hash);
    if (records.empty()) throw Error(ErrorCode::not_found, "no stamp for " + document_hash.hex());

    for (auto& r : records) {
        r.confirmations = r.txid ? chain.get_confirmations(*r.txid) : 0;
        r.status = live_status(r, r.confirmations);
    }
    // records are ordered by window, so the first final one is the earliest
    for (const auto& r : records)
        if (r.status == StampStatus::final) return r;
    return records.back();
}

ProofBundle LedgerStore::export_proof(const Digest32& document_hash, const Chain& chain) const
{
    std::shared_lock lock(mutex_);
    const auto records = records_for_locked(document_hash);
    if (records.empty()) throw Error(ErrorCode::not_found, "no stamp for " + document_hash.hex());

    // Prefer the earliest record whose transaction is mined.
    for (const auto& r : records) {
        if (!r.txid) continue;
        const auto loc = chain.find_transaction(*r.txid);
        if (!loc) continue;
        const Block& block = chain.blocks()[static_cast<std::size_t>(loc->height)];
        ProofBundle b;
        b.document_hash = r.document_hash;
        b.batch_hashes = r.batch_hashes;
        b.aggregated_hash = *r.aggregated_hash;
        b.address = *r.address;
        b.txid = *r.txid;
        b.block_hash = block.hash();
        b.block_height = block.header.height;
        b.block_time = block.header.timestamp;
        b.confirmations_at_export = chain.confirmations(*r.txid);
        return b;
    }
    throw Error(ErrorCode::not_yet_mined, "stamp for " + document_hash.hex() + " is not in a block yet");
}

std::vector<SubmissionReceipt> LedgerStore::unbatched_submissions() const
{
    std::shared_lock lock(mutex_);
    std::set<RecordKey> covered;
    for (const auto& [key, entry] : batches_) {
        if (entry.state != BatchState::open) continue;
        for (const auto& h : entry.commitment.batch.hashes) covered.insert({h, entry.commitment.batch.window_id});
    }
    std::vector<SubmissionReceipt> out;
    for (const auto& [key, r] : records_)
        if (r.status == StampStatus::pending && !covered.contains(key))
            out.push_back({r.document_hash, r.received_at, r.window_id, r.priority});
    return out;
}

std::vector<PendingCommitment> LedgerStore::unfinished_batches() const
{
    std::shared_lock lock(mutex_);
    std::vector<PendingCommitment> out;
    for (const auto& [key, entry] : batches_)
        if (entry.state == BatchState::open) out.push_back(entry.commitment);
    return out;
}

std::vector<CommittedBatch> LedgerStore::unfinalized_commitments() const
{
    std::shared_lock lock(mutex_);
    std::vector<CommittedBatch> out;
    for (const auto& [key, entry] : batches_)
        if (entry.state == BatchState::committed && !final_txids_.contains(*entry.txid))
            out.push_back({entry.commitment, *entry.txid});
    return out;
}

std::vector<WindowId> LedgerStore::closed_windows() const
{
    std::shared_lock lock(mutex_);
    std::set<WindowId> ids;
    for (const auto& [key, entry] : batches_)
        if (!std::get<2>(key)) ids.insert(std::get<0>(key));
    return {ids.begin(), ids.end()};
}

} // namespace chainstamp
