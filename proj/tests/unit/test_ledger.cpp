#include "chainstamp/address.hpp"
#include "chainstamp/error.hpp"
#include "chainstamp/ledger.hpp"

#include "../support/test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <json.hpp>

using namespace chainstamp;

namespace {

struct Committed {
    CommitmentBatch batch;
    std::string address;
    Digest32 txid;
};

Committed commit(LedgerStore& store, SimulatedChain& chain, WindowId window, const std::vector<Digest32>& hashes,
                 UtcSeconds t)
{
    for (const auto& h : hashes) store.record_submission({h, t, window, false});
    auto batch = make_batch(window, hashes, t);
    const auto address = derive_address(batch.aggregated_hash).encoded;
    store.record_batch_intent(batch, address);
    const auto tx = chain.build_transaction(address, 1, 10'000);
    store.record_batch(batch, tx.txid(), address, chain);
    return {batch, address, tx.txid()};
}

std::vector<Digest32> digests(std::initializer_list<const char*> names)
{
    std::vector<Digest32> out;
    for (const char* n : names) out.push_back(sha256(n));
    return out;
}

} // namespace

TEST_CASE("submissions are pending until committed")
{
    LedgerStore store;
    SimulatedChain chain(0);
    const auto t = utc_from_unix(1000);
    store.record_submission({sha256("a"), t, 7, false});
    const auto rec = store.lookup(sha256("a"), chain);
    CHECK(rec.status == StampStatus::pending);
    CHECK_FALSE(rec.txid.has_value());
    CHECK(rec.window_id == 7);
    try {
        store.lookup(sha256("missing"), chain);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::not_found);
    }
}

TEST_CASE("record_batch")
{
    LedgerStore store;
    SimulatedChain chain(0);
    const auto t = utc_from_unix(1000);
    const auto hashes = digests({"a", "b", "c"});
    const auto c = commit(store, chain, 1, hashes, t);

    for (const auto& h : hashes) {
        const auto rec = store.lookup(h, chain);
        CHECK(rec.status == StampStatus::committed);
        CHECK(rec.txid == c.txid);
        CHECK(rec.address == c.address);
        CHECK(rec.aggregated_hash == c.batch.aggregated_hash);
        CHECK(rec.batch_hashes == c.batch.hashes);
    }

    SUBCASE("replay is a no-op")
    {
        CHECK(store.record_batch(c.batch, c.txid, c.address, chain) == 0);
    }
    SUBCASE("address must derive from the aggregate")
    {
        const auto other = derive_address(sha256("other")).encoded;
        try {
            store.record_batch(c.batch, c.txid, other, chain);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::inconsistent_address);
        }
    }
    SUBCASE("transaction must be known to the chain")
    {
        auto batch = make_batch(2, digests({"d"}), t);
        const auto address = derive_address(batch.aggregated_hash).encoded;
        try {
            store.record_batch(batch, sha256("no such tx"), address, chain);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::unknown_transaction);
        }
    }
    SUBCASE("aggregate must recompute")
    {
        auto batch = c.batch;
        batch.aggregated_hash = sha256("forged");
        CHECK_THROWS_AS(store.record_batch(batch, c.txid, derive_address(batch.aggregated_hash).encoded, chain),
                        Error);
    }
}

TEST_CASE("finality boundary")
{
    LedgerStore store;
    SimulatedChain chain(0);
    const auto c = commit(store, chain, 1, digests({"x"}), utc_from_unix(0));
    const auto status_at = [&](int depth) {
        chain.mine_to_depth(c.txid, depth, utc_from_unix(10));
        REQUIRE(chain.get_confirmations(c.txid) == depth);
        return store.lookup(sha256("x"), chain).status;
    };
    CHECK(status_at(1) == StampStatus::committed);
    CHECK(status_at(4) == StampStatus::committed);
    CHECK(status_at(5) == StampStatus::final);
    CHECK(status_at(6) == StampStatus::final);
    CHECK(store.lookup(sha256("x"), chain).confirmations == 6);
}

TEST_CASE("mark_final holds without confirmations")
{
    LedgerStore store;
    SimulatedChain chain(0);
    const auto c = commit(store, chain, 1, digests({"x"}), utc_from_unix(0));
    store.mark_final(c.txid);
    CHECK(store.lookup(sha256("x"), chain).status == StampStatus::final);
    CHECK(store.unfinalized_commitments().empty());
}

TEST_CASE("lookup prefers the earliest final record")
{
    LedgerStore store;
    SimulatedChain chain(0);
    const auto first = commit(store, chain, 1, digests({"x", "y"}), utc_from_unix(0));
    chain.mine_to_depth(first.txid, 5, utc_from_unix(5));
    const auto second = commit(store, chain, 2, digests({"x", "z"}), utc_from_unix(10));
    chain.mine_to_depth(second.txid, 5, utc_from_unix(15));
    const auto rec = store.lookup(sha256("x"), chain);
    CHECK(rec.txid == first.txid);
    CHECK(rec.window_id == 1);
    CHECK(store.records_for(sha256("x")).size() == 2);
}

TEST_CASE("durable across reopen")
{
    testutil::TempDir dir("ledger");
    const auto log = dir / "ledger.jsonl";
    SimulatedChain chain(0);
    Committed c;
    {
        LedgerStore store(log);
        c = commit(store, chain, 3, digests({"p", "q"}), utc_from_unix(100));
        store.record_submission({sha256("r"), utc_from_unix(101), 4, true});
        auto open = make_batch(5, digests({"s"}), utc_from_unix(102));
        store.record_submission({sha256("s"), utc_from_unix(102), 5, false});
        store.record_batch_intent(open, derive_address(open.aggregated_hash).encoded);
    }
    LedgerStore reopened(log);
    CHECK(reopened.lookup(sha256("p"), chain).txid == c.txid);
    CHECK(reopened.lookup(sha256("r"), chain).priority);

    const auto unbatched = reopened.unbatched_submissions();
    REQUIRE(unbatched.size() == 1);
    CHECK(unbatched[0].document_hash == sha256("r"));

    const auto unfinished = reopened.unfinished_batches();
    REQUIRE(unfinished.size() == 1);
    CHECK(unfinished[0].batch.window_id == 5);

    const auto unfinalized = reopened.unfinalized_commitments();
    REQUIRE(unfinalized.size() == 1);
    CHECK(unfinalized[0].txid == c.txid);

    SUBCASE("torn trailing line is discarded")
    {
        {
            std::ofstream out(log, std::ios::app);
            out << "{\"type\":\"submitted\",\"hash\":\"ab";
        }
        LedgerStore again(log);
        CHECK(again.lookup(sha256("q"), chain).txid == c.txid);
        again.record_submission({sha256("t"), utc_from_unix(200), 9, false});
        LedgerStore third(log);
        CHECK(third.lookup(sha256("t"), chain).window_id == 9);
    }
    SUBCASE("abandoned batch is no longer unfinished")
    {
        reopened.record_batch_abandoned(unfinished[0].batch);
        LedgerStore again(log);
        CHECK(again.unfinished_batches().empty());
        // the pending record moves with its requeued hash, so the old one is dropped
        CHECK(again.records_for(sha256("s")).empty());
        CHECK(again.unbatched_submissions().size() == 1);
    }
}

TEST_CASE("export_proof")
{
    LedgerStore store;
    SimulatedChain chain(4);
    const auto c = commit(store, chain, 1, digests({"a", "b"}), utc_from_unix(0));

    try {
        store.export_proof(sha256("a"), chain.snapshot());
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::not_yet_mined);
    }
    CHECK_THROWS_AS(store.export_proof(sha256("zz"), chain.snapshot()), Error);

    chain.mine_to_depth(c.txid, 6, utc_from_unix(50));
    const auto snap = chain.snapshot();
    const auto bundle = store.export_proof(sha256("a"), snap);
    CHECK(bundle.document_hash == sha256("a"));
    CHECK(bundle.batch_hashes == c.batch.hashes);
    CHECK(bundle.aggregated_hash == c.batch.aggregated_hash);
    CHECK(bundle.address == c.address);
    CHECK(bundle.txid == c.txid);
    CHECK(bundle.block_height == 0);
    CHECK(bundle.block_hash == snap.blocks()[0].hash());
    CHECK(bundle.block_time == snap.blocks()[0].header.timestamp);
    CHECK(bundle.confirmations_at_export == 6);

    SUBCASE("json round trip and field order")
    {
        const auto text = bundle.to_json();
        CHECK(ProofBundle::from_json(text) == bundle);
        const auto j = nlohmann::ordered_json::parse(text);
        std::vector<std::string> keys;
        for (const auto& item : j.items()) keys.push_back(item.key());
        const std::vector<std::string> expected{"format_version", "document_hash", "batch_hashes",
                                                "aggregated_hash", "address", "txid",
                                                "block_hash", "block_height", "block_time",
                                                "confirmations_at_export"};
        CHECK(keys == expected);
        CHECK(j["block_time"].get<std::string>() == format_rfc3339(bundle.block_time));
    }
    SUBCASE("malformed bundles")
    {
        CHECK_THROWS_AS(ProofBundle::from_json("not json"), Error);
        CHECK_THROWS_AS(ProofBundle::from_json("{}"), Error);
        auto j = nlohmann::json::parse(bundle.to_json());
        j["format_version"] = 2;
        CHECK_THROWS_AS(ProofBundle::from_json(j.dump()), Error);
        j = nlohmann::json::parse(bundle.to_json());
        j["txid"] = "zz";
        CHECK_THROWS_AS(ProofBundle::from_json(j.dump()), Error);
    }
}
