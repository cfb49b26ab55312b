#include "chainstamp/chain_store.hpp"

#include "chainstamp/error.hpp"
#include "serialize.hpp"

#include <fstream>
#include <iterator>
#include <mutex>

namespace chainstamp {

Bytes encode_chain_record(const Block& block)
{
    const Bytes body = block.serialize();
    Bytes out;
    out.reserve(9 + body.size());
    detail::put_be(out, kChainRecordMagic, 4);
    out.push_back(kChainRecordVersion);
    detail::put_be(out, body.size(), 4);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::vector<Block> parse_chain_records(ByteView data)
{
    detail::Reader in(data);
    std::vector<Block> blocks;
    while (!in.done()) {
        if (in.be(4) != kChainRecordMagic) detail::Reader::fail("bad chain record magic");
        if (in.be(1) != kChainRecordVersion) detail::Reader::fail("unsupported chain record version");
        const auto len = in.be(4);
        blocks.push_back(Block::deserialize(in.take(static_cast<std::size_t>(len))));
    }
    return blocks;
}

std::vector<Block> read_chain_file(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) return {};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open chain file " + path.string());
    const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_chain_records(data);
}

void append_chain_record(const std::filesystem::path& path, const Block& block)
{
    const Bytes record = encode_chain_record(block);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.write(reinterpret_cast<const char*>(record.data()), static_cast<std::streamsize>(record.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "cannot append to chain file " + path.string());
}

void write_chain_file(const std::filesystem::path& path, std::span<const Block> blocks)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& block : blocks) {
        const Bytes record = encode_chain_record(block);
        out.write(reinterpret_cast<const char*>(record.data()), static_cast<std::streamsize>(record.size()));
    }
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "cannot write chain file " + path.string());
}

Chain load_chain(const std::filesystem::path& path, unsigned difficulty_bits)
{
    Chain chain(difficulty_bits);
    for (auto& block : read_chain_file(path)) chain.append_block(std::move(block));
    return chain;
}

// --- SimulatedChain ---------------------------------------------------------

SimulatedChain::SimulatedChain(unsigned difficulty_bits, std::filesystem::path file)
    : chain_(file.empty() ? Chain(difficulty_bits) : load_chain(file, difficulty_bits)), file_(std::move(file))
{
}

Digest32 SimulatedChain::submit_transaction(const Transaction& tx)
{
    std::unique_lock lock(mutex_);
    return chain_.submit_transaction(tx);
}

std::optional<Transaction> SimulatedChain::get_transaction(const Digest32& txid) const
{
    std::shared_lock lock(mutex_);
    if (const Transaction* tx = chain_.transaction(txid)) return *tx;
    return std::nullopt;
}

int SimulatedChain::get_confirmations(const Digest32& txid) const
{
    std::shared_lock lock(mutex_);
    return chain_.confirmations(txid);
}

std::optional<BlockHeader> SimulatedChain::get_block_header(std::int64_t height) const
{
    std::shared_lock lock(mutex_);
    if (height < 0 || height > chain_.tip_height()) return std::nullopt;
    return chain_.blocks()[static_cast<std::size_t>(height)].header;
}

Transaction SimulatedChain::build_transaction(std::string_view address, Satoshi dust, Satoshi fee)
{
    std::unique_lock lock(mutex_);
    return chain_.build_transaction(address, dust, fee);
}

std::vector<Block> SimulatedChain::mine(int count, UtcSeconds now)
{
    std::unique_lock lock(mutex_);
    std::vector<Block> mined;
    for (int i = 0; i < count; ++i) {
        const Block& block = chain_.mine_block(now);
        if (!file_.empty()) append_chain_record(file_, block);
        mined.push_back(block);
    }
    return mined;
}

int SimulatedChain::mine_to_depth(const Digest32& txid, int depth, UtcSeconds now)
{
    std::unique_lock lock(mutex_);
    if (!chain_.in_mempool(txid) && !chain_.find_transaction(txid))
        throw Error(ErrorCode::unknown_transaction, "transaction " + txid.hex() + " is unknown");
    int mined = 0;
    while (chain_.confirmations(txid) < depth) {
        const Block& block = chain_.mine_block(now);
        if (!file_.empty()) append_chain_record(file_, block);
        ++mined;
    }
    return mined;
}

std::int64_t SimulatedChain::tip_height() const
{
    std::shared_lock lock(mutex_);
    return chain_.tip_height();
}

Chain SimulatedChain::snapshot() const
{
    std::shared_lock lock(mutex_);
    return chain_;
}

} // namespace chainstamp
