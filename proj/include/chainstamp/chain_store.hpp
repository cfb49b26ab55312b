#pragma once

#include "chainstamp/chain.hpp"

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <vector>

namespace chainstamp {

// Chain file: one record per block, appended in height order.
//   magic "TSSH" (0x54535348, big-endian) | version 0x01 | u32 BE length | block bytes
inline constexpr std::uint32_t kChainRecordMagic = 0x54535348;
inline constexpr std::uint8_t kChainRecordVersion = 0x01;

Bytes encode_chain_record(const Block& block);

/// Parses every record. Throws Error{corrupt_record} on a bad frame or block
/// encoding, Error{io_error} if the file cannot be read. A missing file is
/// an empty chain.
std::vector<Block> read_chain_file(const std::filesystem::path& path);
std::vector<Block> parse_chain_records(ByteView data);

void append_chain_record(const std::filesystem::path& path, const Block& block);
void write_chain_file(const std::filesystem::path& path, std::span<const Block> blocks);

/// Loads and validates a chain file into a Chain. Throws corrupt_record if
/// the records do not form a valid chain.
Chain load_chain(const std::filesystem::path& path, unsigned difficulty_bits);

/// Read/submit surface a real node backend would implement.
class ChainClient {
public:
    virtual ~ChainClient() = default;

    virtual Digest32 submit_transaction(const Transaction& tx) = 0;
    virtual std::optional<Transaction> get_transaction(const Digest32& txid) const = 0;
    virtual int get_confirmations(const Digest32& txid) const = 0;
    virtual std::optional<BlockHeader> get_block_header(std::int64_t height) const = 0;
};

/// Thread-safe simulator backend. Single writer, concurrent readers; every
/// mined block is appended to `file` when one is configured.
class SimulatedChain final : public ChainClient {
public:
    explicit SimulatedChain(unsigned difficulty_bits, std::filesystem::path file = {});

    Digest32 submit_transaction(const Transaction& tx) override;
    std::optional<Transaction> get_transaction(const Digest32& txid) const override;
    int get_confirmations(const Digest32& txid) const override;
    std::optional<BlockHeader> get_block_header(std::int64_t height) const override;

    Transaction build_transaction(std::string_view address, Satoshi dust, Satoshi fee);
    std::vector<Block> mine(int count, UtcSeconds now);

    /// Mines until `txid` has at least `depth` confirmations. Returns the
    /// number of blocks mined.
    int mine_to_depth(const Digest32& txid, int depth, UtcSeconds now);

    std::int64_t tip_height() const;
    Chain snapshot() const;
    const std::filesystem::path& file() const noexcept { return file_; }

private:
    mutable std::shared_mutex mutex_;
    Chain chain_;
    std::filesystem::path file_;
};

} // namespace chainstamp
