#include "chainstamp/address.hpp"
#include "chainstamp/verifier.hpp"

#include "../support/test_util.hpp"

#include <doctest.h>

using namespace chainstamp;

namespace {

struct Fixture {
    LedgerStore store;
    SimulatedChain chain{6};
    CommitmentBatch batch;
    Digest32 txid;
    Bytes document{'f', 'o', 'x', ' ', '1', '2'};

    explicit Fixture(int depth = 6)
    {
        const auto t = utc_from_unix(1'400'000'000);
        const std::vector<Digest32> hashes{sha256(document), sha256("other"), sha256("third")};
        for (const auto& h : hashes) store.record_submission({h, t, 1, false});
        batch = make_batch(1, hashes, t);
        const auto address = derive_address(batch.aggregated_hash).encoded;
        txid = chain.build_transaction(address, 1, 10'000).txid();
        store.record_batch(batch, txid, address, chain);
        if (depth > 0) chain.mine_to_depth(txid, depth, t + std::chrono::seconds(30));
    }

    ProofBundle bundle() const { return store.export_proof(sha256(document), chain.snapshot()); }
};

} // namespace

TEST_CASE("verified stamp")
{
    Fixture f;
    const auto snap = f.chain.snapshot();
    const auto report = verify_document_bytes(f.document, f.bundle(), snap);
    CHECK(report.verdict == Verdict::verified);
    CHECK(report.attested_time == snap.blocks()[0].header.timestamp);
    CHECK(report.confirmations == 6);
    CHECK(report.verdict_line() == "VERDICT=verified");
    CHECK(report.render().ends_with("VERDICT=verified\n"));
    CHECK(verify_via_service(sha256(f.document), f.store, snap).verdict == Verdict::verified);
}

TEST_CASE("pending below finality")
{
    Fixture f(3);
    const auto report = verify_with_bundle(sha256(f.document), f.bundle(), f.chain.snapshot());
    CHECK(report.verdict == Verdict::pending);
    CHECK(report.failed_check == VerificationCheck::finality);
    CHECK(report.confirmations == 3);
}

TEST_CASE("service verification of unknown and unmined digests")
{
    Fixture f(0);
    const auto snap = f.chain.snapshot();
    CHECK(verify_via_service(sha256("never stamped"), f.store, snap).verdict == Verdict::unknown);
    CHECK(verify_via_service(sha256(f.document), f.store, snap).verdict == Verdict::pending);
    SUBCASE("transaction vanished from the chain")
    {
        const Chain empty(6);
        const auto r = verify_via_service(sha256(f.document), f.store, empty);
        CHECK(r.verdict == Verdict::mismatch);
        CHECK(r.failed_check == VerificationCheck::transaction_on_chain);
    }
}

TEST_CASE("each check catches its own failure")
{
    Fixture f;
    const auto snap = f.chain.snapshot();
    const auto digest = sha256(f.document);
    const auto expect_fail = [&](const ProofBundle& b, VerificationCheck check, const Chain& chain) {
        const auto r = verify_with_bundle(digest, b, chain);
        CHECK(r.verdict == Verdict::mismatch);
        CHECK(r.failed_check == check);
        CHECK_FALSE(r.attested_time.has_value());
    };

    SUBCASE("altered document")
    {
        Bytes doc = f.document;
        doc[0] ^= 1;
        const auto r = verify_document_bytes(doc, f.bundle(), snap);
        CHECK(r.verdict == Verdict::mismatch);
        CHECK(r.failed_check == VerificationCheck::digest_in_batch);
    }
    SUBCASE("aggregate")
    {
        auto b = f.bundle();
        b.batch_hashes.push_back(sha256("extra"));
        expect_fail(b, VerificationCheck::aggregate_matches, snap);
    }
    SUBCASE("address")
    {
        auto b = f.bundle();
        b.address = derive_address(sha256("elsewhere")).encoded;
        expect_fail(b, VerificationCheck::address_matches, snap);
        b.address = "not an address";
        expect_fail(b, VerificationCheck::address_matches, snap);
    }
    SUBCASE("testnet encoding of the same aggregate is accepted")
    {
        auto b = f.bundle();
        b.address = derive_address(b.aggregated_hash, kTestnetP2pkh).encoded;
        // the transaction pays the mainnet form, so check 4 fails instead
        expect_fail(b, VerificationCheck::transaction_on_chain, snap);
    }
    SUBCASE("transaction")
    {
        auto b = f.bundle();
        b.txid = sha256("missing tx");
        expect_fail(b, VerificationCheck::transaction_on_chain, snap);
    }
    SUBCASE("block claims")
    {
        auto b = f.bundle();
        b.block_time += std::chrono::seconds(1);
        expect_fail(b, VerificationCheck::block_matches, snap);
        b = f.bundle();
        b.block_hash = sha256("nope");
        expect_fail(b, VerificationCheck::block_matches, snap);
        b = f.bundle();
        b.block_height = 1;
        expect_fail(b, VerificationCheck::block_matches, snap);
    }
    SUBCASE("tampered chain copy")
    {
        auto blocks = snap.blocks();
        blocks[2].header.nonce += 1;
        const auto tampered = Chain::from_blocks_unchecked(blocks, snap.difficulty_bits());
        expect_fail(f.bundle(), VerificationCheck::block_matches, tampered);
    }
    SUBCASE("wrong dust amount")
    {
        VerifyPolicy policy;
        policy.dust_satoshi = 2;
        const auto r = verify_with_bundle(digest, f.bundle(), snap, policy);
        CHECK(r.verdict == Verdict::mismatch);
        CHECK(r.failed_check == VerificationCheck::transaction_on_chain);
    }
}
