#include "chainstamp/base58.hpp"
#include "chainstamp/error.hpp"

#include "../support/oracle.hpp"
#include "../support/vectors.hpp"

#include <doctest.h>

#include <random>

using namespace chainstamp;

namespace {

ErrorCode decode_error(std::string_view s)
{
    try {
        base58check_decode(s);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("decode unexpectedly succeeded for " << s);
    return ErrorCode::io_error;
}

} // namespace

TEST_CASE("base58check known answers encode and decode")
{
    for (const auto& v : vectors::base58check()) {
        const Bytes payload = from_hex(v.payload_hex);
        CHECK(base58check_encode(v.version, payload) == v.encoded);
        const auto decoded = base58check_decode(v.encoded);
        CHECK(decoded.version == v.version);
        CHECK(decoded.payload == payload);
    }
}

TEST_CASE("base58check roundtrip and oracle agreement on random inputs")
{
    std::mt19937_64 rng(58);
    for (int i = 0; i < 2000; ++i) {
        const auto version = static_cast<std::uint8_t>(rng());
        Bytes payload = testutil::random_bytes(rng, 1 + rng() % 64);
        if (i % 5 == 0) std::fill_n(payload.begin(), std::min<std::size_t>(payload.size(), rng() % 4), 0);
        const std::string encoded = base58check_encode(version, payload);
        REQUIRE(encoded == oracle::base58check(version, payload));
        REQUIRE(base58check_decode(encoded) == VersionedPayload{version, payload});
        if (version == 0) REQUIRE(encoded.front() == '1');
    }
}

TEST_CASE("base58check rejects every single-character substitution in 1000 random samples")
{
    std::mt19937_64 rng(1234);
    int accepted = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string s = base58check_encode(static_cast<std::uint8_t>(rng()), testutil::random_bytes(rng, 20));
        const std::size_t pos = rng() % s.size();
        char replacement;
        do {
            replacement = kBase58Alphabet[rng() % kBase58Alphabet.size()];
        } while (replacement == s[pos]);
        s[pos] = replacement;
        try {
            base58check_decode(s);
            ++accepted;
        } catch (const Error&) {
        }
    }
    CHECK(accepted == 0);
}

TEST_CASE("base58check error paths")
{
    CHECK(decode_error("1111111111111111111114oLvT3") == ErrorCode::checksum_mismatch);
    CHECK(decode_error("10111111111111111111114oLvT2") == ErrorCode::invalid_character);
    CHECK(decode_error("1111111111111111111114oLvTO") == ErrorCode::invalid_character);
    CHECK(decode_error("111111111111111111111IoLvT2") == ErrorCode::invalid_character);
    CHECK(decode_error("l111111111111111111114oLvT2") == ErrorCode::invalid_character);
    CHECK(decode_error("") == ErrorCode::invalid_payload);

    CHECK_THROWS_AS(base58check_encode(0, Bytes{}), Error);
    CHECK_THROWS_AS(base58check_encode(0, Bytes(65, 1)), Error);
    try {
        base58check_encode(0, Bytes{});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_payload);
    }
}

TEST_CASE("plain base58 leading zeros")
{
    CHECK(base58_encode(Bytes{0, 0, 0}) == "111");
    CHECK(base58_decode("111") == Bytes{0, 0, 0});
    CHECK(base58_encode(Bytes{}) == "");
    CHECK(base58_decode("") == Bytes{});
}
