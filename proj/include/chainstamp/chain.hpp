#pragma once

// Simulated Bitcoin-style block chain. Difficulty is a count of required
// leading zero bits in the double-SHA-256 block hash; nonce search is
// sequential from zero so mining is reproducible.

#include "chainstamp/aggregator.hpp"
#include "chainstamp/digest.hpp"
#include "chainstamp/timeutil.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainstamp {

inline constexpr unsigned kDefaultDifficultyBits = 16;
inline constexpr unsigned kMaxDifficultyBits = 28;

// Network observations quoted for context only; nothing simulates them.
inline constexpr int kObservedNetworkNodes = 6500;
inline constexpr int kObservedMinutesToFinality = 60;

struct TxOutput {
    std::string address;
    Satoshi amount = 0;

    friend bool operator==(const TxOutput&, const TxOutput&) = default;
};

/// Funding is implicit (coinbase-style); only outputs and the fee are
/// committed to the txid.
struct Transaction {
    std::vector<TxOutput> outputs;
    Satoshi fee = 0;

    /// varint(field count), then varint(len) || bytes per field, fields
    /// [address_utf8, amount_be8]* then fee_be8.
    Bytes serialize() const;
    static Transaction deserialize(ByteView bytes);
    Digest32 txid() const;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct BlockHeader {
    static constexpr std::size_t kSerializedSize = 8 + 32 + 32 + 8 + 1 + 8;

    std::int64_t height = 0;
    Digest32 prev_hash;
    Digest32 merkle_root;
    UtcSeconds timestamp{};
    unsigned difficulty_bits = 0;
    std::uint64_t nonce = 0;

    std::array<std::uint8_t, kSerializedSize> serialize() const;
    static BlockHeader deserialize(ByteView bytes);
    Digest32 hash() const;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;

    Digest32 hash() const { return header.hash(); }
    Bytes serialize() const;
    static Block deserialize(ByteView bytes);

    friend bool operator==(const Block&, const Block&) = default;
};

/// Bitcoin convention: parent = dsha256(left || right), last node duplicated
/// on odd levels, a single leaf is its own root. Throws Error{empty_input}.
Digest32 merkle_root(std::span<const Digest32> leaves);

/// Merkle root over the transactions' txids; all-zero for an empty block.
Digest32 transactions_root(std::span<const Transaction> txs);

struct TxLocation {
    std::int64_t height = 0;
    std::size_t index = 0;
};

class Chain {
public:
    explicit Chain(unsigned difficulty_bits = kDefaultDifficultyBits);

    /// Indexes blocks without validating them, for inspecting untrusted
    /// chain data. Run validate_chain() before trusting the result.
    static Chain from_blocks_unchecked(std::vector<Block> blocks, unsigned difficulty_bits);

    unsigned difficulty_bits() const noexcept { return difficulty_; }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const std::vector<Transaction>& mempool() const noexcept { return mempool_; }

    /// Height of the tip, -1 for an empty chain.
    std::int64_t tip_height() const noexcept { return static_cast<std::int64_t>(blocks_.size()) - 1; }

    /// Builds a single-output transaction and places it in the mempool.
    /// Throws Error{invalid_address} if `address` fails Base58Check.
    Transaction build_transaction(std::string_view address, Satoshi dust, Satoshi fee);

    /// Adds to the mempool unless the txid is already pending or mined.
    /// Returns the txid either way.
    Digest32 submit_transaction(const Transaction& tx);

    /// Mines the whole mempool into a new tip block.
    const Block& mine_block(UtcSeconds now);

    /// Appends an externally produced block after checking it against the tip.
    /// Throws Error{corrupt_record} with the violation on failure.
    void append_block(Block block);

    /// Earliest block containing the txid.
    std::optional<TxLocation> find_transaction(const Digest32& txid) const;
    bool in_mempool(const Digest32& txid) const;
    const Transaction* transaction(const Digest32& txid) const;

    /// 0 when absent or pending, else 1 + tip height - containing height.
    int confirmations(const Digest32& txid) const;

private:
    void index_block(const Block& block);

    unsigned difficulty_;
    std::vector<Block> blocks_;
    std::vector<Transaction> mempool_;
    std::map<Digest32, TxLocation> index_;
};

enum class ViolationKind { height, prev_hash, difficulty, proof_of_work, merkle_root, timestamp, transaction };

std::string_view to_string(ViolationKind kind) noexcept;

struct ChainViolation {
    std::int64_t height = 0;
    ViolationKind kind = ViolationKind::height;
    std::string detail;
};

struct ValidationResult {
    std::optional<ChainViolation> violation;

    bool ok() const noexcept { return !violation.has_value(); }
    explicit operator bool() const noexcept { return ok(); }
};

/// Checks heights, linkage, difficulty, proof of work, merkle roots,
/// monotone timestamps and output amounts. Every block must carry
/// `required_difficulty` bits, or the genesis block's value when unset.
ValidationResult validate_chain(std::span<const Block> blocks,
                                std::optional<unsigned> required_difficulty = std::nullopt);

struct AttackOutcome {
    bool success = false;
    std::int64_t steps = 0;
};

/// Private-fork race. The attacker starts `target_depth` blocks behind; each
/// step the attacker finds the next block with probability
/// `attacker_fraction`, otherwise the honest network does. Success means the
/// attacker's fork becomes strictly longer within `max_steps`.
AttackOutcome simulate_rewrite_attack(int target_depth, double attacker_fraction, std::int64_t max_steps,
                                      std::uint64_t seed);

/// Same race against the transaction's current confirmation depth.
AttackOutcome simulate_rewrite_attack(const Chain& chain, const Digest32& txid, double attacker_fraction,
                                      std::int64_t max_steps, std::uint64_t seed);

/// Fraction of `trials` successful races, seeds base_seed .. base_seed+trials-1.
double attack_success_rate(int target_depth, double attacker_fraction, std::int64_t max_steps, int trials,
                           std::uint64_t base_seed);

} // namespace chainstamp
