#include "chainstamp/error.hpp"
#include "chainstamp/tsa.hpp"

#include "../support/test_util.hpp"

#include <doctest.h>

using namespace chainstamp;

TEST_CASE("base64")
{
    CHECK(base64_encode(as_bytes("")) == "");
    CHECK(base64_encode(as_bytes("f")) == "Zg==");
    CHECK(base64_encode(as_bytes("fo")) == "Zm8=");
    CHECK(base64_encode(as_bytes("foo")) == "Zm9v");
    CHECK(base64_encode(as_bytes("foobar")) == "Zm9vYmFy");
    CHECK(base64_decode("Zm9vYg==") == Bytes{'f', 'o', 'o', 'b'});
    CHECK_THROWS_AS(base64_decode("Zm9v!"), Error);
    CHECK_THROWS_AS(base64_decode("Zm9"), Error);
}

TEST_CASE("canonical string")
{
    const auto d = sha256("abc");
    CHECK(tsa_canonical_string(d, "2014-01-01T00:00:00Z") == d.hex() + "|2014-01-01T00:00:00Z");
}

TEST_CASE("issued tokens verify and altered tokens do not")
{
    const auto signer = Ed25519Signer::generate();
    const auto pub = signer.public_key();
    CHECK(pub.key_id() == signer.key_id());
    CHECK(pub.key_id() == sha256(pub.raw()).hex().substr(0, 16));

    const auto token = issue_timestamp(sha256("doc"), utc_from_unix(1'400'000'000), signer);
    CHECK(token.plaintext_time == "2014-05-13T16:53:20Z");
    CHECK(verify_tsa_token(token, pub));
    CHECK(TsaToken::from_json(token.to_json()) == token);

    auto t = token;
    t.document_hash.bytes[0] ^= 1;
    CHECK_FALSE(verify_tsa_token(t, pub));
    t = token;
    t.plaintext_time = "2014-05-13T16:53:21Z";
    CHECK_FALSE(verify_tsa_token(t, pub));
    t = token;
    t.signature[10] ^= 0x80;
    CHECK_FALSE(verify_tsa_token(t, pub));
    t = token;
    t.key_id = "0000000000000000";
    CHECK_FALSE(verify_tsa_token(t, pub));

    const auto other = Ed25519Signer::generate();
    CHECK_FALSE(verify_tsa_token(token, other.public_key()));
}

TEST_CASE("a leaked key forges tokens that verify")
{
    const auto authority = Ed25519Signer::generate();
    const auto leaked = Ed25519Signer::from_private_bytes(authority.private_bytes());
    const auto forged = issue_timestamp(sha256("backdated"), utc_from_unix(0), leaked);
    CHECK(verify_tsa_token(forged, authority.public_key()));
}

TEST_CASE("deterministic signer from seed")
{
    Bytes seed(32, 7);
    const auto a = Ed25519Signer::from_private_bytes(seed);
    const auto b = Ed25519Signer::from_private_bytes(seed);
    CHECK(a.key_id() == b.key_id());
    CHECK(a.sign(as_bytes("m")) == b.sign(as_bytes("m")));
    CHECK(a.public_key().verify(as_bytes("m"), b.sign(as_bytes("m"))));
    CHECK_THROWS_AS(Ed25519Signer::from_private_bytes(Bytes(31, 0)), Error);
    CHECK_THROWS_AS(TsaToken::from_json("{}"), Error);
}
