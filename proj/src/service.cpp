#include "chainstamp/service.hpp"

#include "chainstamp/address.hpp"
#include "chainstamp/error.hpp"

#include <json.hpp>

#include <charconv>
#include <condition_variable>
#include <iostream>

namespace chainstamp {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::int64_t kMaxHeadersPerRequest = 2'000;
constexpr int kMaxMinePerRequest = 1'000;
constexpr std::size_t kDefaultAnnouncementLimit = 1'000;
constexpr std::size_t kMaxAnnouncementLimit = 10'000;

ApiResponse ok(const ojson& body)
{
    return {200, body.dump(), "application/json"};
}

/// Error for a hash that is not 64 hex characters: 400 for bad characters,
/// 422 for a wrong length.
struct HashProblem {
    int status;
    std::string_view code;
    std::string detail;
};

std::optional<HashProblem> check_hash(std::string_view text, Digest32& out)
{
    try {
        out = Digest32::from_hex(text);
        return std::nullopt;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_length)
            return HashProblem{422, "wrong_length",
                               "expected 64 hex characters, got " + std::to_string(text.size())};
        return HashProblem{400, "malformed_hash", "hash must contain only hexadecimal characters"};
    }
}

ApiResponse problem_response(const HashProblem& p)
{
    return error_response(p.status, p.code, p.detail);
}

std::optional<json> parse_object(std::string_view body)
{
    try {
        json j = json::parse(body);
        if (j.is_object()) return j;
    } catch (const json::exception&) {
    }
    return std::nullopt;
}

std::optional<std::string> unknown_key(const json& j, std::initializer_list<std::string_view> allowed)
{
    for (const auto& [key, value] : j.items()) {
        bool found = false;
        for (auto a : allowed) found = found || key == a;
        if (!found) return key;
    }
    return std::nullopt;
}

std::optional<std::int64_t> parse_int(std::string_view text)
{
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
    return v;
}

ojson receipt_json(const SubmissionReceipt& r)
{
    return ojson{{"document_hash", r.document_hash.hex()},
                 {"window_id", r.window_id},
                 {"received_at", format_rfc3339(r.received_at)},
                 {"priority", r.priority},
                 {"status", "pending"}};
}

ojson record_json(const StampRecord& r)
{
    ojson j{{"document_hash", r.document_hash.hex()},
            {"status", std::string(to_string(r.status))},
            {"window_id", r.window_id},
            {"received_at", format_rfc3339(r.received_at)},
            {"priority", r.priority},
            {"confirmations", r.confirmations}};
    if (r.txid) {
        j["txid"] = r.txid->hex();
        j["aggregated_hash"] = r.aggregated_hash->hex();
        j["address"] = *r.address;
        j["batch_size"] = r.batch_hashes.size();
    }
    return j;
}

ojson header_json(const BlockHeader& h)
{
    return ojson{{"height", h.height},
                 {"hash", h.hash().hex()},
                 {"prev_hash", h.prev_hash.hex()},
                 {"merkle_root", h.merkle_root.hex()},
                 {"timestamp", format_rfc3339(h.timestamp)},
                 {"difficulty_bits", h.difficulty_bits},
                 {"nonce", h.nonce}};
}

ApiResponse internal_error(const std::exception& e)
{
    return error_response(500, "internal", e.what());
}

} // namespace

ApiResponse error_response(int status, std::string_view code, std::string_view detail)
{
    return {status, ojson{{"error", code}, {"detail", detail}}.dump(), "application/json"};
}

StampService::StampService(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      chain_((validate_config(config_), config_.difficulty_bits),
             config_.data_dir.empty() ? std::filesystem::path{} : config_.data_dir / "chain.dat"),
      ledger_(config_.data_dir.empty() ? std::filesystem::path{} : config_.data_dir / "ledger.jsonl",
              config_.finality_depth),
      aggregator_(std::chrono::seconds(config_.window_seconds)),
      announcer_(config_.data_dir.empty() ? std::filesystem::path{} : config_.data_dir / "announcements.log",
                 config_.webhook_url)
{
    recover();
}

void StampService::recover()
{
    for (WindowId w : ledger_.closed_windows()) aggregator_.mark_closed(w);
    for (const auto& r : ledger_.unbatched_submissions()) aggregator_.restore(r);

    // The mempool is not persisted: put committed-but-unmined transactions
    // back. The transaction is rebuilt from the recorded address, so its txid
    // is unchanged unless dust or fee were reconfigured.
    for (const auto& c : ledger_.unfinalized_commitments()) {
        if (chain_.get_transaction(c.txid)) continue;
        const auto tx = chain_.build_transaction(c.commitment.address, config_.dust_satoshi, config_.fee_satoshi);
        if (tx.txid() != c.txid) ledger_.record_batch(c.commitment.batch, tx.txid(), c.commitment.address, chain_);
    }

    // Batches closed before a crash but never recorded are recommitted.
    TickReport report;
    for (const auto& pc : ledger_.unfinished_batches())
        finish_commit(pc.batch, pc.address, clock_(), report);
}

// --- handlers ---------------------------------------------------------------------

ApiResponse StampService::handle_submit(std::string_view body)
{
    const auto j = parse_object(body);
    if (!j) return error_response(400, "invalid_request", "body must be a JSON object");
    if (auto key = unknown_key(*j, {"hash", "priority"}))
        return error_response(400, "invalid_request", "unexpected field '" + *key + "'; only digests are accepted");
    if (!j->contains("hash") || !j->at("hash").is_string())
        return error_response(400, "invalid_request", "field 'hash' must be a string");
    bool priority = false;
    if (j->contains("priority")) {
        if (!j->at("priority").is_boolean())
            return error_response(400, "invalid_request", "field 'priority' must be a boolean");
        priority = j->at("priority").get<bool>();
    }
    Digest32 hash;
    if (auto p = check_hash(j->at("hash").get<std::string>(), hash)) return problem_response(*p);
    try {
        return ok(receipt_json(submit(hash, priority)));
    } catch (const std::exception& e) {
        return internal_error(e);
    }
}

ApiResponse StampService::handle_bulk(std::string_view body)
{
    const auto j = parse_object(body);
    if (!j) return error_response(400, "invalid_request", "body must be a JSON object");
    if (auto key = unknown_key(*j, {"hashes", "priority"}))
        return error_response(400, "invalid_request", "unexpected field '" + *key + "'; only digests are accepted");
    if (!j->contains("hashes") || !j->at("hashes").is_array())
        return error_response(400, "invalid_request", "field 'hashes' must be an array");
    bool priority = false;
    if (j->contains("priority")) {
        if (!j->at("priority").is_boolean())
            return error_response(400, "invalid_request", "field 'priority' must be a boolean");
        priority = j->at("priority").get<bool>();
    }
    const auto& items = j->at("hashes");
    if (items.empty()) return error_response(400, "invalid_request", "'hashes' must not be empty");
    if (items.size() > kMaxBulkHashes)
        return error_response(413, "too_large",
                              "at most " + std::to_string(kMaxBulkHashes) + " hashes per request, got " +
                                  std::to_string(items.size()));

    std::vector<Digest32> hashes(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::optional<HashProblem> p;
        if (!items[i].is_string()) p = HashProblem{400, "malformed_hash", "entry is not a string"};
        else p = check_hash(items[i].get<std::string>(), hashes[i]);
        if (p) {
            ojson err{{"error", p->code}, {"detail", "entry " + std::to_string(i) + ": " + p->detail}, {"index", i}};
            return {400, err.dump(), "application/json"};
        }
    }
    try {
        const auto receipts = submit_bulk(hashes, priority);
        ojson out{{"window_id", receipts.front().window_id}, {"receipts", ojson::array()}};
        for (const auto& r : receipts) out["receipts"].push_back(receipt_json(r));
        return ok(out);
    } catch (const std::exception& e) {
        return internal_error(e);
    }
}

ApiResponse StampService::handle_status(std::string_view hash_hex) const
{
    Digest32 hash;
    if (auto p = check_hash(hash_hex, hash)) return problem_response(*p);
    try {
        return ok(record_json(status(hash)));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::not_found) return error_response(404, "not_found", e.what());
        return internal_error(e);
    }
}

ApiResponse StampService::handle_proof(std::string_view hash_hex) const
{
    Digest32 hash;
    if (auto p = check_hash(hash_hex, hash)) return problem_response(*p);
    try {
        return {200, proof(hash).to_json(), "application/json"};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::not_found) return error_response(404, "not_found", e.what());
        if (e.code() == ErrorCode::not_yet_mined) return error_response(409, "not_yet_mined", e.what());
        return internal_error(e);
    }
}

ApiResponse StampService::handle_announcements(std::optional<std::string> since,
                                               std::optional<std::string> limit) const
{
    std::optional<UtcSeconds> from;
    if (since) {
        try {
            from = parse_rfc3339(*since);
        } catch (const Error& e) {
            return error_response(400, "invalid_request", std::string("since: ") + e.what());
        }
    }
    std::size_t n = kDefaultAnnouncementLimit;
    if (limit) {
        const auto v = parse_int(*limit);
        if (!v || *v < 1 || static_cast<std::size_t>(*v) > kMaxAnnouncementLimit)
            return error_response(400, "invalid_request",
                                  "limit must be an integer in [1, " + std::to_string(kMaxAnnouncementLimit) + "]");
        n = static_cast<std::size_t>(*v);
    }
    ojson out{{"announcements", ojson::array()}};
    for (const auto& e : announcer_.entries(from, n))
        out["announcements"].push_back({{"document_hash", e.document_hash.hex()},
                                        {"announced_at", format_rfc3339(e.announced_at)},
                                        {"sink", std::string(to_string(e.sink))}});
    return ok(out);
}

ApiResponse StampService::handle_chain_info() const
{
    const auto tip = chain_.tip_height();
    ojson out{{"difficulty_bits", config_.difficulty_bits},
              {"tip_height", tip},
              {"finality_depth", config_.finality_depth},
              {"dust_satoshi", config_.dust_satoshi},
              {"fee_satoshi", config_.fee_satoshi}};
    if (tip >= 0) out["tip_hash"] = chain_.get_block_header(tip)->hash().hex();
    return ok(out);
}

ApiResponse StampService::handle_chain_headers(std::optional<std::string> from, std::optional<std::string> to) const
{
    const auto tip = chain_.tip_height();
    std::int64_t lo = 0, hi = tip;
    if (from) {
        const auto v = parse_int(*from);
        if (!v || *v < 0) return error_response(400, "invalid_request", "from must be a non-negative integer");
        lo = *v;
    }
    if (to) {
        const auto v = parse_int(*to);
        if (!v || *v < 0) return error_response(400, "invalid_request", "to must be a non-negative integer");
        hi = std::min(*v, tip);
    }
    if (hi - lo + 1 > kMaxHeadersPerRequest)
        return error_response(413, "too_large",
                              "at most " + std::to_string(kMaxHeadersPerRequest) + " headers per request");
    ojson out{{"tip_height", tip}, {"headers", ojson::array()}};
    for (auto h = lo; h <= hi; ++h)
        if (auto header = chain_.get_block_header(h)) out["headers"].push_back(header_json(*header));
    return ok(out);
}

ApiResponse StampService::handle_chain_transaction(std::string_view txid_hex) const
{
    Digest32 txid;
    if (auto p = check_hash(txid_hex, txid)) return problem_response(*p);
    const auto snapshot = chain_.snapshot();
    const Transaction* tx = snapshot.transaction(txid);
    if (!tx) return error_response(404, "not_found", "unknown transaction " + txid.hex());
    ojson out{{"txid", txid.hex()}, {"outputs", ojson::array()}, {"fee", tx->fee}};
    for (const auto& o : tx->outputs) out["outputs"].push_back({{"address", o.address}, {"amount", o.amount}});
    out["confirmations"] = snapshot.confirmations(txid);
    if (const auto loc = snapshot.find_transaction(txid)) {
        out["block_height"] = loc->height;
        out["block_hash"] = snapshot.blocks()[static_cast<std::size_t>(loc->height)].hash().hex();
    }
    return ok(out);
}

ApiResponse StampService::handle_chain_export() const
{
    const auto snapshot = chain_.snapshot();
    std::string body;
    for (const auto& block : snapshot.blocks()) {
        const Bytes record = encode_chain_record(block);
        body.append(record.begin(), record.end());
    }
    return {200, std::move(body), "application/octet-stream"};
}

ApiResponse StampService::handle_mine(std::string_view body)
{
    const auto j = parse_object(body.empty() ? std::string_view("{}") : body);
    if (!j) return error_response(400, "invalid_request", "body must be a JSON object");
    if (auto key = unknown_key(*j, {"blocks"}))
        return error_response(400, "invalid_request", "unexpected field '" + *key + "'");
    int count = 1;
    if (j->contains("blocks")) {
        if (!j->at("blocks").is_number_integer())
            return error_response(400, "invalid_request", "blocks must be an integer");
        const auto v = j->at("blocks").get<std::int64_t>();
        if (v < 0 || v > kMaxMinePerRequest)
            return error_response(400, "invalid_request",
                                  "blocks must be in [0, " + std::to_string(kMaxMinePerRequest) + "]");
        count = static_cast<int>(v);
    }
    try {
        const auto blocks = mine(count);
        return ok(ojson{{"mined", blocks.size()}, {"tip_height", chain_.tip_height()}});
    } catch (const std::exception& e) {
        return internal_error(e);
    }
}

// --- typed operations -------------------------------------------------------------------

SubmissionReceipt StampService::submit(const Digest32& hash, bool priority)
{
    return submit_bulk(std::span(&hash, 1), priority).front();
}

std::vector<SubmissionReceipt> StampService::submit_bulk(std::span<const Digest32> hashes, bool priority)
{
    // Serialized so the announcement log follows submission order.
    std::lock_guard lock(submit_mutex_);
    const auto now = clock_();
    std::vector<bool> created;
    auto receipts = aggregator_.submit_many(hashes, priority, now, &created);
    for (std::size_t i = 0; i < receipts.size(); ++i)
        if (created[i]) ledger_.record_submission(receipts[i]);
    for (std::size_t i = 0; i < receipts.size(); ++i)
        if (created[i]) announcer_.announce(receipts[i].document_hash, now);
    return receipts;
}

StampRecord StampService::status(const Digest32& hash) const
{
    return ledger_.lookup(hash, chain_);
}

ProofBundle StampService::proof(const Digest32& hash) const
{
    return ledger_.export_proof(hash, chain_.snapshot());
}

// --- scheduler -----------------------------------------------------------------------

TickReport StampService::tick(UtcSeconds now)
{
    std::lock_guard lock(tick_mutex_);
    TickReport report;
    for (const auto& batch : aggregator_.take_priority_batches(now)) commit(batch, now, report);
    for (WindowId id : aggregator_.closable_windows(now)) {
        std::optional<CommitmentBatch> batch;
        try {
            batch = aggregator_.close_window(id, now);
        } catch (const Error& e) {
            std::clog << "window " << id << ": " << e.what() << "\n";
            continue;
        }
        if (batch) commit(*batch, now, report);
    }
    advance_commitments(now, report);
    return report;
}

void StampService::commit(const CommitmentBatch& batch, UtcSeconds now, TickReport& report)
{
    const auto address = derive_address(batch.aggregated_hash, config_.address_version).encoded;
    ledger_.record_batch_intent(batch, address);
    fault("intent", batch);
    finish_commit(batch, address, now, report);
}

void StampService::finish_commit(const CommitmentBatch& batch, const std::string& address, UtcSeconds now,
                                 TickReport& report)
{
    try {
        const auto tx = chain_.build_transaction(address, config_.dust_satoshi, config_.fee_satoshi);
        fault("transaction", batch);
        ledger_.record_batch(batch, tx.txid(), address, chain_);
        report.batches_committed++;
        report.txids.push_back(tx.txid());
    } catch (const std::exception& e) {
        // Never drop hashes: requeue them before giving the batch up.
        std::clog << "commitment of window " << batch.window_id << " failed: " << e.what() << "\n";
        for (const auto& r : aggregator_.requeue(batch, now)) ledger_.record_submission(r);
        ledger_.record_batch_abandoned(batch);
        report.batches_failed++;
        return;
    }
    fault("recorded", batch);
}

void StampService::advance_commitments(UtcSeconds now, TickReport& report)
{
    const int depth = config_.finality_depth;
    for (const auto& c : ledger_.unfinalized_commitments()) {
        if (config_.mine_to_finality && chain_.get_confirmations(c.txid) < depth && chain_.get_transaction(c.txid))
            chain_.mine_to_depth(c.txid, depth, now);
        if (chain_.get_confirmations(c.txid) >= depth) {
            ledger_.mark_final(c.txid);
            report.commitments_finalized++;
        }
    }
}

void StampService::run_scheduler(std::stop_token stop)
{
    std::mutex m;
    std::condition_variable_any cv;
    while (!stop.stop_requested()) {
        try {
            tick();
        } catch (const std::exception& e) {
            std::clog << "scheduler tick failed: " << e.what() << "\n";
        }
        std::unique_lock lock(m);
        cv.wait_for(lock, stop, std::chrono::milliseconds(config_.tick_milliseconds), [] { return false; });
    }
}

std::vector<Block> StampService::mine(int count)
{
    std::lock_guard lock(tick_mutex_);
    auto blocks = chain_.mine(count, clock_());
    const int depth = config_.finality_depth;
    for (const auto& c : ledger_.unfinalized_commitments())
        if (chain_.get_confirmations(c.txid) >= depth) ledger_.mark_final(c.txid);
    return blocks;
}

void StampService::set_fault_hook(FaultHook hook)
{
    std::lock_guard lock(tick_mutex_);
    fault_hook_ = std::move(hook);
}

void StampService::fault(std::string_view stage, const CommitmentBatch& batch)
{
    if (fault_hook_) fault_hook_(stage, batch);
}

} // namespace chainstamp
