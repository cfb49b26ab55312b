#include "chainstamp/address.hpp"
#include "chainstamp/base58.hpp"
#include "chainstamp/error.hpp"

#include "../support/oracle.hpp"
#include "../support/vectors.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace chainstamp;

TEST_CASE("derive_address known answers")
{
    const Digest32 zero{};
    CHECK(derive_address(zero).encoded == vectors::kZeroAggregateMainnet);
    CHECK(derive_address(zero, kTestnetP2pkh).encoded == vectors::kZeroAggregateTestnet);
    CHECK(derive_address(zero).payload.hex() == "b8bcb07f6344b42ab04250c86a6e8b75d3fdbbc6");
}

TEST_CASE("derive_address agrees with the oracle pipeline and round-trips")
{
    std::mt19937_64 rng(160);
    for (int i = 0; i < 500; ++i) {
        const Digest32 agg = testutil::random_digest(rng);
        const auto addr = derive_address(agg);
        const oracle::Bytes raw(agg.bytes.begin(), agg.bytes.end());
        REQUIRE(addr.encoded == oracle::base58check(0x00, oracle::ripemd160(oracle::sha256(raw))));
        REQUIRE(addr.encoded.front() == '1');
        REQUIRE(addr.encoded.size() >= 26);
        REQUIRE(addr.encoded.size() <= 35);
        const auto decoded = base58check_decode(addr.encoded);
        REQUIRE(decoded.payload == Bytes(addr.payload.bytes.begin(), addr.payload.bytes.end()));
        REQUIRE(parse_address(addr.encoded) == addr);
    }
}

TEST_CASE("distinct aggregated hashes give distinct addresses")
{
    std::mt19937_64 rng(10000);
    std::set<std::string> addresses;
    for (int i = 0; i < 10000; ++i) addresses.insert(derive_address(testutil::random_digest(rng)).encoded);
    CHECK(addresses.size() == 10000);
}

TEST_CASE("parse_address rejects corrupted and wrong-size inputs")
{
    std::string s = vectors::kZeroAggregateMainnet;
    s.back() = s.back() == 'X' ? 'Y' : 'X';
    try {
        parse_address(s);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_address);
    }
    CHECK_THROWS_AS(parse_address(base58check_encode(0, Bytes(19, 1))), Error);
}
