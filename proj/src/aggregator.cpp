#include "chainstamp/aggregator.hpp"

#include "chainstamp/error.hpp"

#include <algorithm>

namespace chainstamp {

std::vector<Digest32> canonical_hash_set(std::span<const Digest32> hashes)
{
    std::vector<Digest32> out(hashes.begin(), hashes.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Digest32 aggregate(std::span<const Digest32> hashes)
{
    if (hashes.empty()) throw Error(ErrorCode::empty_input, "cannot aggregate an empty hash set");
    Sha256 ctx;
    for (const auto& h : canonical_hash_set(hashes)) ctx.update(h.view());
    return ctx.finish();
}

CommitmentBatch make_batch(WindowId window, std::span<const Digest32> hashes, UtcSeconds created_at,
                           bool priority)
{
    CommitmentBatch batch;
    batch.window_id = window;
    batch.hashes = canonical_hash_set(hashes);
    batch.aggregated_hash = aggregate(batch.hashes);
    batch.created_at = created_at;
    batch.priority = priority;
    return batch;
}

Satoshi annual_cost_satoshi(const CostModel& model, std::int64_t windows_per_year)
{
    if (windows_per_year < 0)
        throw Error(ErrorCode::invalid_payload, "windows_per_year must be non-negative");
    return windows_per_year * (model.dust_satoshi + model.fee_satoshi);
}

Rational annual_cost_btc(const CostModel& model, std::int64_t windows_per_year)
{
    return Rational(annual_cost_satoshi(model, windows_per_year)) / kSatoshiPerBtc;
}

Rational annual_cost_usd(const CostModel& model, std::int64_t windows_per_year)
{
    return annual_cost_btc(model, windows_per_year) * model.btc_price_usd;
}

Rational parse_decimal(std::string_view text)
{
    auto fail = [&] { return Error(ErrorCode::config_error, "not a decimal number: '" + std::string(text) + "'"); };
    if (text.empty()) throw fail();
    boost::multiprecision::cpp_int numerator = 0, denominator = 1;
    bool seen_point = false, seen_digit = false;
    for (char c : text) {
        if (c == '.' && !seen_point) {
            seen_point = true;
            continue;
        }
        if (c < '0' || c > '9') throw fail();
        seen_digit = true;
        numerator = numerator * 10 + (c - '0');
        if (seen_point) denominator *= 10;
    }
    if (!seen_digit) throw fail();
    return Rational(numerator, denominator);
}

// --- Aggregator -----------------------------------------------------------------

Aggregator::Aggregator(std::chrono::seconds window_length) : length_(window_length)
{
    if (length_.count() <= 0)
        throw Error(ErrorCode::config_error, "window length must be positive");
}

WindowId Aggregator::window_of(UtcSeconds t) const noexcept
{
    const auto s = unix_seconds(t);
    const auto len = length_.count();
    // floor division, so pre-epoch times still map to [start, end)
    return s >= 0 ? s / len : -((-s + len - 1) / len);
}

UtcSeconds Aggregator::window_start(WindowId id) const noexcept
{
    return utc_from_unix(id * length_.count());
}

UtcSeconds Aggregator::window_end(WindowId id) const noexcept
{
    return window_start(id + 1);
}

WindowId Aggregator::first_open_at_or_after(WindowId id) const
{
    while (closed_.contains(id)) ++id;
    return id;
}

SubmissionReceipt Aggregator::submit_hash(const Digest32& hash, bool priority, UtcSeconds now, bool* created)
{
    std::lock_guard lock(mutex_);
    const WindowId id = first_open_at_or_after(window_of(now));
    auto& window = open_[id];
    if (created) *created = false;
    if (auto it = window.entries.find(hash); it != window.entries.end()) return it->second;
    if (created) *created = true;

    SubmissionReceipt receipt{hash, now, id, priority};
    window.entries.emplace(hash, receipt);
    if (priority) priority_queue_.push_back(receipt);
    return receipt;
}

std::vector<SubmissionReceipt> Aggregator::submit_many(std::span<const Digest32> hashes, bool priority, UtcSeconds now,
                                                   std::vector<bool>* created)
{
    std::lock_guard lock(mutex_);
    const WindowId id = first_open_at_or_after(window_of(now));
    auto& window = open_[id];
    std::vector<SubmissionReceipt> out;
    out.reserve(hashes.size());
    if (created) created->assign(hashes.size(), false);
    for (std::size_t i = 0; i < hashes.size(); ++i) {
        auto [it, inserted] = window.entries.try_emplace(hashes[i], SubmissionReceipt{hashes[i], now, id, priority});
        if (inserted && priority) priority_queue_.push_back(it->second);
        if (created) (*created)[i] = inserted;
        out.push_back(it->second);
    }
    return out;
}

std::optional<CommitmentBatch> Aggregator::close_window(WindowId id, UtcSeconds now)
{
    std::lock_guard lock(mutex_);
    if (closed_.contains(id))
        throw Error(ErrorCode::window_already_closed, "window " + std::to_string(id) + " is already closed");
    if (now < window_end(id))
        throw Error(ErrorCode::window_still_open, "window " + std::to_string(id) + " has not elapsed");

    closed_.insert(id);
    auto node = open_.extract(id);
    if (node.empty()) return std::nullopt;

    std::vector<Digest32> hashes;
    for (const auto& [hash, receipt] : node.mapped().entries)
        if (!receipt.priority) hashes.push_back(hash);
    if (hashes.empty()) return std::nullopt;
    return make_batch(id, hashes, now);
}

std::vector<CommitmentBatch> Aggregator::take_priority_batches(UtcSeconds now)
{
    std::lock_guard lock(mutex_);
    std::vector<CommitmentBatch> batches;
    batches.reserve(priority_queue_.size());
    for (const auto& receipt : priority_queue_)
        batches.push_back(make_batch(receipt.window_id, std::span(&receipt.document_hash, 1), now, true));
    priority_queue_.clear();
    return batches;
}

std::vector<WindowId> Aggregator::closable_windows(UtcSeconds now) const
{
    std::lock_guard lock(mutex_);
    std::vector<WindowId> ids;
    for (const auto& [id, window] : open_)
        if (window_end(id) <= now) ids.push_back(id);
    return ids;
}

std::vector<SubmissionReceipt> Aggregator::requeue(const CommitmentBatch& batch, UtcSeconds now)
{
    std::lock_guard lock(mutex_);
    const WindowId id = first_open_at_or_after(std::max(window_of(now), batch.window_id + 1));
    auto& window = open_[id];
    std::vector<SubmissionReceipt> receipts;
    for (const auto& hash : batch.hashes) {
        auto [it, inserted] = window.entries.try_emplace(hash, SubmissionReceipt{hash, now, id, false});
        if (inserted) receipts.push_back(it->second);
    }
    return receipts;
}

void Aggregator::restore(const SubmissionReceipt& receipt)
{
    std::lock_guard lock(mutex_);
    SubmissionReceipt r = receipt;
    r.window_id = first_open_at_or_after(receipt.window_id);
    auto [it, inserted] = open_[r.window_id].entries.try_emplace(r.document_hash, r);
    if (inserted && r.priority) priority_queue_.push_back(r);
}

void Aggregator::mark_closed(WindowId id)
{
    std::lock_guard lock(mutex_);
    closed_.insert(id);
}

std::optional<SubmissionReceipt> Aggregator::find(const Digest32& hash, WindowId id) const
{
    std::lock_guard lock(mutex_);
    auto w = open_.find(id);
    if (w == open_.end()) return std::nullopt;
    auto it = w->second.entries.find(hash);
    if (it == w->second.entries.end()) return std::nullopt;
    return it->second;
}

std::size_t Aggregator::queued_count() const
{
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [id, window] : open_) n += window.entries.size();
    return n;
}

} // namespace chainstamp
