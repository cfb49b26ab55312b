#include "chainstamp/chain.hpp"

#include "chainstamp/address.hpp"
#include "chainstamp/error.hpp"
#include "serialize.hpp"

#include <algorithm>
#include <cstring>
#include <random>

namespace chainstamp {

using detail::put_be;
using detail::put_varint;
using detail::Reader;

// --- Transaction ------------------------------------------------------------

Bytes Transaction::serialize() const
{
    Bytes out;
    put_varint(out, 2 * outputs.size() + 1);
    for (const auto& o : outputs) {
        put_varint(out, o.address.size());
        out.insert(out.end(), o.address.begin(), o.address.end());
        put_varint(out, 8);
        put_be(out, static_cast<std::uint64_t>(o.amount), 8);
    }
    put_varint(out, 8);
    put_be(out, static_cast<std::uint64_t>(fee), 8);
    return out;
}

Transaction Transaction::deserialize(ByteView bytes)
{
    Reader in(bytes);
    const std::uint64_t fields = in.varint();
    if (fields % 2 == 0 || fields > 2 * 1024 + 1) Reader::fail("bad transaction field count");

    auto amount_field = [&] {
        if (in.varint() != 8) Reader::fail("amount field must be 8 bytes");
        return static_cast<Satoshi>(in.be(8));
    };

    Transaction tx;
    for (std::uint64_t i = 0; i < fields / 2; ++i) {
        const auto len = in.varint();
        auto addr = in.take(static_cast<std::size_t>(len));
        TxOutput out;
        out.address.assign(addr.begin(), addr.end());
        out.amount = amount_field();
        tx.outputs.push_back(std::move(out));
    }
    tx.fee = amount_field();
    if (!in.done()) Reader::fail("trailing bytes after transaction");
    return tx;
}

Digest32 Transaction::txid() const
{
    return double_sha256(serialize());
}

// --- Block ------------------------------------------------------------------

std::array<std::uint8_t, BlockHeader::kSerializedSize> BlockHeader::serialize() const
{
    Bytes out;
    out.reserve(kSerializedSize);
    put_be(out, static_cast<std::uint64_t>(height), 8);
    out.insert(out.end(), prev_hash.bytes.begin(), prev_hash.bytes.end());
    out.insert(out.end(), merkle_root.bytes.begin(), merkle_root.bytes.end());
    put_be(out, static_cast<std::uint64_t>(unix_seconds(timestamp)), 8);
    out.push_back(static_cast<std::uint8_t>(difficulty_bits));
    put_be(out, nonce, 8);
    std::array<std::uint8_t, kSerializedSize> fixed{};
    std::copy(out.begin(), out.end(), fixed.begin());
    return fixed;
}

BlockHeader BlockHeader::deserialize(ByteView bytes)
{
    Reader in(bytes);
    BlockHeader h;
    h.height = static_cast<std::int64_t>(in.be(8));
    h.prev_hash = Digest32::from_bytes(in.take(32));
    h.merkle_root = Digest32::from_bytes(in.take(32));
    h.timestamp = utc_from_unix(static_cast<std::int64_t>(in.be(8)));
    h.difficulty_bits = static_cast<unsigned>(in.be(1));
    h.nonce = in.be(8);
    if (!in.done()) Reader::fail("trailing bytes after block header");
    return h;
}

Digest32 BlockHeader::hash() const
{
    return double_sha256(serialize());
}

Bytes Block::serialize() const
{
    const auto head = header.serialize();
    Bytes out(head.begin(), head.end());
    put_varint(out, transactions.size());
    for (const auto& tx : transactions) {
        const Bytes body = tx.serialize();
        put_varint(out, body.size());
        out.insert(out.end(), body.begin(), body.end());
    }
    return out;
}

Block Block::deserialize(ByteView bytes)
{
    Reader in(bytes);
    Block block;
    block.header = BlockHeader::deserialize(in.take(BlockHeader::kSerializedSize));
    const auto count = in.varint();
    if (count > in.remaining()) Reader::fail("transaction count exceeds record size");
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = in.varint();
        block.transactions.push_back(Transaction::deserialize(in.take(static_cast<std::size_t>(len))));
    }
    if (!in.done()) Reader::fail("trailing bytes after block");
    return block;
}

// --- Merkle tree --------------------------------------------------------------

Digest32 merkle_root(std::span<const Digest32> leaves)
{
    if (leaves.empty()) throw Error(ErrorCode::empty_input, "merkle tree needs at least one leaf");
    std::vector<Digest32> level(leaves.begin(), leaves.end());
    std::array<std::uint8_t, 64> pair{};
    while (level.size() > 1) {
        if (level.size() % 2 == 1) level.push_back(level.back());
        std::vector<Digest32> next;
        next.reserve(level.size() / 2);
        for (std::size_t i = 0; i < level.size(); i += 2) {
            std::memcpy(pair.data(), level[i].bytes.data(), 32);
            std::memcpy(pair.data() + 32, level[i + 1].bytes.data(), 32);
            next.push_back(double_sha256(pair));
        }
        level = std::move(next);
    }
    return level.front();
}

Digest32 transactions_root(std::span<const Transaction> txs)
{
    if (txs.empty()) return Digest32{};
    std::vector<Digest32> ids;
    ids.reserve(txs.size());
    for (const auto& tx : txs) ids.push_back(tx.txid());
    return merkle_root(ids);
}

namespace {

std::optional<ChainViolation> check_block(const Block& block, const Block* parent, std::int64_t expected_height,
                                          unsigned difficulty)
{
    const BlockHeader& h = block.header;
    auto violation = [&](ViolationKind kind, std::string detail) {
        return ChainViolation{expected_height, kind, std::move(detail)};
    };

    const Digest32 expected_prev = parent ? parent->hash() : Digest32{};
    if (h.prev_hash != expected_prev)
        return violation(ViolationKind::prev_hash, "prev_hash does not match parent hash");
    if (h.height != expected_height)
        return violation(ViolationKind::height, "expected height " + std::to_string(expected_height) +
                                                    ", found " + std::to_string(h.height));
    if (h.difficulty_bits != difficulty)
        return violation(ViolationKind::difficulty, "block declares " + std::to_string(h.difficulty_bits) +
                                                        " bits, chain requires " + std::to_string(difficulty));
    if (leading_zero_bits(h.hash()) < difficulty)
        return violation(ViolationKind::proof_of_work, "block hash misses the difficulty target");
    if (transactions_root(block.transactions) != h.merkle_root)
        return violation(ViolationKind::merkle_root, "merkle root does not match transactions");
    if (parent && h.timestamp < parent->header.timestamp)
        return violation(ViolationKind::timestamp, "timestamp precedes parent");
    for (const auto& tx : block.transactions) {
        const bool bad_amount = std::any_of(tx.outputs.begin(), tx.outputs.end(),
                                            [](const TxOutput& o) { return o.amount < 1; });
        if (tx.outputs.empty() || tx.fee < 0 || bad_amount)
            return violation(ViolationKind::transaction, "transaction " + tx.txid().hex() + " has an invalid amount");
    }
    return std::nullopt;
}

} // namespace

// --- Chain ------------------------------------------------------------------

Chain::Chain(unsigned difficulty_bits) : difficulty_(difficulty_bits)
{
    if (difficulty_bits > kMaxDifficultyBits)
        throw Error(ErrorCode::config_error,
                    "difficulty_bits must be 0-" + std::to_string(kMaxDifficultyBits));
}

Chain Chain::from_blocks_unchecked(std::vector<Block> blocks, unsigned difficulty_bits)
{
    Chain chain(difficulty_bits);
    chain.blocks_ = std::move(blocks);
    for (const auto& block : chain.blocks_) chain.index_block(block);
    return chain;
}

Transaction Chain::build_transaction(std::string_view address, Satoshi dust, Satoshi fee)
{
    parse_address(address);
    if (dust < 1) throw Error(ErrorCode::invalid_payload, "output amount must be at least 1 satoshi");
    if (fee < 0) throw Error(ErrorCode::invalid_payload, "fee must be non-negative");
    Transaction tx{{TxOutput{std::string(address), dust}}, fee};
    submit_transaction(tx);
    return tx;
}

Digest32 Chain::submit_transaction(const Transaction& tx)
{
    if (tx.outputs.empty()) throw Error(ErrorCode::invalid_payload, "transaction has no outputs");
    for (const auto& o : tx.outputs) {
        parse_address(o.address);
        if (o.amount < 1) throw Error(ErrorCode::invalid_payload, "output amount must be at least 1 satoshi");
    }
    const Digest32 id = tx.txid();
    if (!index_.contains(id) && !in_mempool(id)) mempool_.push_back(tx);
    return id;
}

const Block& Chain::mine_block(UtcSeconds now)
{
    Block block;
    block.header.height = static_cast<std::int64_t>(blocks_.size());
    block.header.timestamp = now;
    if (!blocks_.empty()) {
        block.header.prev_hash = blocks_.back().hash();
        block.header.timestamp = std::max(now, blocks_.back().header.timestamp);
    }
    block.transactions = std::move(mempool_);
    mempool_.clear();
    block.header.merkle_root = transactions_root(block.transactions);
    block.header.difficulty_bits = difficulty_;

    auto raw = block.header.serialize();
    constexpr std::size_t nonce_offset = BlockHeader::kSerializedSize - 8;
    for (std::uint64_t nonce = 0;; ++nonce) {
        for (int i = 0; i < 8; ++i) raw[nonce_offset + static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
        if (leading_zero_bits(double_sha256(raw)) >= difficulty_) {
            block.header.nonce = nonce;
            break;
        }
    }

    blocks_.push_back(std::move(block));
    index_block(blocks_.back());
    return blocks_.back();
}

void Chain::append_block(Block block)
{
    const Block* parent = blocks_.empty() ? nullptr : &blocks_.back();
    if (auto v = check_block(block, parent, tip_height() + 1, difficulty_))
        throw Error(ErrorCode::corrupt_record, "block rejected at height " + std::to_string(v->height) + ": " +
                                                   std::string(to_string(v->kind)) + ": " + v->detail);
    blocks_.push_back(std::move(block));
    index_block(blocks_.back());
    std::erase_if(mempool_, [this](const Transaction& tx) { return index_.contains(tx.txid()); });
}

void Chain::index_block(const Block& block)
{
    for (std::size_t i = 0; i < block.transactions.size(); ++i)
        index_.try_emplace(block.transactions[i].txid(), TxLocation{block.header.height, i});
}

std::optional<TxLocation> Chain::find_transaction(const Digest32& txid) const
{
    auto it = index_.find(txid);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Chain::in_mempool(const Digest32& txid) const
{
    return std::any_of(mempool_.begin(), mempool_.end(), [&](const Transaction& tx) { return tx.txid() == txid; });
}

const Transaction* Chain::transaction(const Digest32& txid) const
{
    if (auto loc = find_transaction(txid))
        return &blocks_[static_cast<std::size_t>(loc->height)].transactions[loc->index];
    for (const auto& tx : mempool_)
        if (tx.txid() == txid) return &tx;
    return nullptr;
}

int Chain::confirmations(const Digest32& txid) const
{
    auto loc = find_transaction(txid);
    if (!loc) return 0;
    return static_cast<int>(tip_height() - loc->height + 1);
}

// --- validation -------------------------------------------------------------

std::string_view to_string(ViolationKind kind) noexcept
{
    switch (kind) {
    case ViolationKind::height: return "height";
    case ViolationKind::prev_hash: return "prev_hash";
    case ViolationKind::difficulty: return "difficulty";
    case ViolationKind::proof_of_work: return "proof_of_work";
    case ViolationKind::merkle_root: return "merkle_root";
    case ViolationKind::timestamp: return "timestamp";
    case ViolationKind::transaction: return "transaction";
    }
    return "unknown";
}

ValidationResult validate_chain(std::span<const Block> blocks, std::optional<unsigned> required_difficulty)
{
    if (blocks.empty()) return {};
    const unsigned difficulty = required_difficulty.value_or(blocks.front().header.difficulty_bits);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (auto v = check_block(blocks[i], i ? &blocks[i - 1] : nullptr, static_cast<std::int64_t>(i), difficulty))
            return {std::move(v)};
    }
    return {};
}

// --- rewrite attack -------------------------------------------------------------

AttackOutcome simulate_rewrite_attack(int target_depth, double attacker_fraction, std::int64_t max_steps,
                                      std::uint64_t seed)
{
    if (target_depth < 1) throw Error(ErrorCode::invalid_payload, "target_depth must be at least 1");
    if (!(attacker_fraction >= 0.0 && attacker_fraction <= 1.0))
        throw Error(ErrorCode::invalid_payload, "attacker_fraction must lie in [0, 1]");

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution attacker_wins(attacker_fraction);
    // deficit = honest length - attacker length; success once it goes negative.
    std::int64_t deficit = target_depth;
    for (std::int64_t step = 1; step <= max_steps; ++step) {
        deficit += attacker_wins(rng) ? -1 : 1;
        if (deficit < 0) return {true, step};
        if (deficit >= max_steps - step) return {false, step};
    }
    return {false, max_steps};
}

AttackOutcome simulate_rewrite_attack(const Chain& chain, const Digest32& txid, double attacker_fraction,
                                      std::int64_t max_steps, std::uint64_t seed)
{
    const int depth = chain.confirmations(txid);
    if (depth == 0) return {true, 0}; // nothing mined yet, nothing to rewrite
    return simulate_rewrite_attack(depth, attacker_fraction, max_steps, seed);
}

double attack_success_rate(int target_depth, double attacker_fraction, std::int64_t max_steps, int trials,
                           std::uint64_t base_seed)
{
    if (trials <= 0) return 0.0;
    int wins = 0;
    for (int i = 0; i < trials; ++i)
        wins += simulate_rewrite_attack(target_depth, attacker_fraction, max_steps,
                                        base_seed + static_cast<std::uint64_t>(i)).success;
    return static_cast<double>(wins) / trials;
}

} // namespace chainstamp
