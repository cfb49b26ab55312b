#include "chainstamp/verifier.hpp"

#include "chainstamp/address.hpp"
#include "chainstamp/error.hpp"

#include <algorithm>
#include <sstream>

namespace chainstamp {

std::string_view to_string(Verdict verdict) noexcept
{
    switch (verdict) {
    case Verdict::verified: return "verified";
    case Verdict::pending: return "pending";
    case Verdict::mismatch: return "mismatch";
    case Verdict::unknown: return "unknown";
    }
    return "unknown";
}

std::string VerificationReport::verdict_line() const
{
    return "VERDICT=" + std::string(to_string(verdict));
}

std::string VerificationReport::render() const
{
    std::ostringstream out;
    out << "verdict:       " << to_string(verdict) << '\n';
    out << "confirmations: " << confirmations << '\n';
    if (attested_time) out << "attested time: " << format_rfc3339(*attested_time) << '\n';
    if (failed_check) out << "failed check:  " << static_cast<int>(*failed_check) << '\n';
    if (failure_detail) out << "detail:        " << *failure_detail << '\n';
    out << verdict_line() << '\n';
    return out.str();
}

namespace {

VerificationReport mismatch(VerificationCheck check, std::string detail)
{
    VerificationReport r;
    r.verdict = Verdict::mismatch;
    r.failed_check = check;
    r.failure_detail = "check " + std::to_string(static_cast<int>(check)) + ": " + std::move(detail);
    return r;
}

} // namespace

VerificationReport verify_with_bundle(const Digest32& content_digest, const ProofBundle& bundle, const Chain& chain,
                                      const VerifyPolicy& policy)
{
    const auto& batch = bundle.batch_hashes;
    if (std::find(batch.begin(), batch.end(), content_digest) == batch.end())
        return mismatch(VerificationCheck::digest_in_batch,
                        "document digest " + content_digest.hex() + " is not in the batch");

    if (batch.empty() || aggregate(batch) != bundle.aggregated_hash)
        return mismatch(VerificationCheck::aggregate_matches, "batch hashes do not aggregate to the bundle's hash");

    BitcoinAddress claimed;
    try {
        claimed = parse_address(bundle.address);
    } catch (const Error& e) {
        return mismatch(VerificationCheck::address_matches, e.what());
    }
    if (derive_address(bundle.aggregated_hash, claimed.version).encoded != bundle.address)
        return mismatch(VerificationCheck::address_matches, "address is not derived from the aggregated hash");

    const auto loc = chain.find_transaction(bundle.txid);
    if (!loc) return mismatch(VerificationCheck::transaction_on_chain, "transaction " + bundle.txid.hex() + " is not in any block");
    const Block& block = chain.blocks()[static_cast<std::size_t>(loc->height)];
    const Transaction& tx = block.transactions[loc->index];
    const bool pays_dust = std::any_of(tx.outputs.begin(), tx.outputs.end(), [&](const TxOutput& o) {
        return o.address == bundle.address && o.amount == policy.dust_satoshi;
    });
    if (!pays_dust)
        return mismatch(VerificationCheck::transaction_on_chain,
                        "transaction does not pay " + std::to_string(policy.dust_satoshi) + " satoshi to " + bundle.address);

    if (block.header.height != bundle.block_height)
        return mismatch(VerificationCheck::block_matches, "transaction is in block " + std::to_string(block.header.height) +
                                                              ", bundle says " + std::to_string(bundle.block_height));
    if (block.hash() != bundle.block_hash)
        return mismatch(VerificationCheck::block_matches, "containing block hash differs from the bundle");
    if (block.header.timestamp != bundle.block_time)
        return mismatch(VerificationCheck::block_matches, "containing block time differs from the bundle");
    if (const auto result = validate_chain(chain.blocks(), chain.difficulty_bits()); !result.ok())
        return mismatch(VerificationCheck::block_matches,
                        "chain fails validation at height " + std::to_string(result.violation->height) + " (" +
                            std::string(to_string(result.violation->kind)) + ")");

    VerificationReport r;
    r.confirmations = chain.confirmations(bundle.txid);
    if (r.confirmations >= policy.finality_depth) {
        r.verdict = Verdict::verified;
        r.attested_time = block.header.timestamp;
    } else {
        r.verdict = Verdict::pending;
        r.failed_check = VerificationCheck::finality;
        r.failure_detail = std::to_string(r.confirmations) + " of " + std::to_string(policy.finality_depth) +
                           " confirmations";
    }
    return r;
}

VerificationReport verify_document_bytes(ByteView content, const ProofBundle& bundle, const Chain& chain,
                                         const VerifyPolicy& policy)
{
    return verify_with_bundle(sha256(content), bundle, chain, policy);
}

VerificationReport verify_via_service(const Digest32& content_digest, const LedgerStore& store, const Chain& chain,
                                      const VerifyPolicy& policy)
{
    const auto records = store.records_for(content_digest);
    VerificationReport r;
    if (records.empty()) {
        r.verdict = Verdict::unknown;
        r.failure_detail = "digest " + content_digest.hex() + " was never submitted";
        return r;
    }

    try {
        return verify_with_bundle(content_digest, store.export_proof(content_digest, chain), chain, policy);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::not_yet_mined) throw;
    }

    // Nothing exportable. Either the commitment is still on its way, or the
    // chain no longer holds a transaction the store says was committed.
    for (const auto& rec : records) {
        if (!rec.txid || chain.in_mempool(*rec.txid)) continue;
        ProofBundle partial;
        partial.document_hash = rec.document_hash;
        partial.batch_hashes = rec.batch_hashes;
        partial.aggregated_hash = *rec.aggregated_hash;
        partial.address = *rec.address;
        partial.txid = *rec.txid;
        return verify_with_bundle(content_digest, partial, chain, policy);
    }
    r.verdict = Verdict::pending;
    r.failed_check = VerificationCheck::transaction_on_chain;
    r.failure_detail = "commitment transaction is not in a block yet";
    return r;
}

} // namespace chainstamp
