#include "chainstamp/tsa.hpp"

#include "chainstamp/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <memory>

namespace chainstamp {

namespace {

using PkeyPtr = std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

constexpr std::size_t kEd25519KeySize = 32;
constexpr std::size_t kEd25519SignatureSize = 64;

std::string key_id_of(ByteView public_raw)
{
    return sha256(public_raw).hex().substr(0, 16);
}

} // namespace

// --- base64 -------------------------------------------------------------------

std::string base64_encode(ByteView data)
{
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                                  static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

Bytes base64_decode(std::string_view text)
{
    if (text.size() % 4 != 0) throw Error(ErrorCode::invalid_payload, "base64 length is not a multiple of 4");
    Bytes out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw Error(ErrorCode::invalid_payload, "malformed base64");
    std::size_t padding = 0;
    if (!text.empty() && text.back() == '=') ++padding;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
    out.resize(static_cast<std::size_t>(n) - padding);
    return out;
}

// --- Ed25519 ------------------------------------------------------------------

Ed25519PublicKey Ed25519PublicKey::from_bytes(ByteView raw)
{
    if (raw.size() != kEd25519KeySize) throw Error(ErrorCode::invalid_payload, "Ed25519 public key must be 32 bytes");
    return Ed25519PublicKey(Bytes(raw.begin(), raw.end()));
}

bool Ed25519PublicKey::verify(ByteView message, ByteView signature) const
{
    if (signature.size() != kEd25519SignatureSize) return false;
    PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, raw_.data(), raw_.size()), EVP_PKEY_free);
    MdCtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!key || !ctx || EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(), message.size()) == 1;
}

std::string Ed25519PublicKey::key_id() const
{
    return key_id_of(raw_);
}

Ed25519Signer::Ed25519Signer(Bytes seed) : seed_(std::move(seed))
{
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed_.data(), seed_.size()), EVP_PKEY_free);
    if (!key) throw Error(ErrorCode::signing_failure, "cannot load Ed25519 private key");
    std::size_t len = kEd25519KeySize;
    public_raw_.resize(len);
    if (EVP_PKEY_get_raw_public_key(key.get(), public_raw_.data(), &len) != 1)
        throw Error(ErrorCode::signing_failure, "cannot derive Ed25519 public key");
}

Ed25519Signer Ed25519Signer::generate()
{
    Bytes seed(kEd25519KeySize);
    if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1)
        throw Error(ErrorCode::signing_failure, "random number generator failed");
    return Ed25519Signer(std::move(seed));
}

Ed25519Signer Ed25519Signer::from_private_bytes(ByteView seed)
{
    if (seed.size() != kEd25519KeySize) throw Error(ErrorCode::signing_failure, "Ed25519 seed must be 32 bytes");
    return Ed25519Signer(Bytes(seed.begin(), seed.end()));
}

Bytes Ed25519Signer::sign(ByteView message) const
{
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed_.data(), seed_.size()), EVP_PKEY_free);
    MdCtxPtr ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!key || !ctx || EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
        throw Error(ErrorCode::signing_failure, "cannot initialise Ed25519 signing");
    Bytes sig(kEd25519SignatureSize);
    std::size_t len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1)
        throw Error(ErrorCode::signing_failure, "Ed25519 signing failed");
    sig.resize(len);
    return sig;
}

std::string Ed25519Signer::key_id() const
{
    return key_id_of(public_raw_);
}

Ed25519PublicKey Ed25519Signer::public_key() const
{
    return Ed25519PublicKey::from_bytes(public_raw_);
}

Bytes Ed25519Signer::private_bytes() const
{
    return seed_;
}

// --- tokens -------------------------------------------------------------------

std::string TsaToken::to_json() const
{
    nlohmann::ordered_json j;
    j["document_hash"] = document_hash.hex();
    j["plaintext_time"] = plaintext_time;
    j["signature_b64"] = base64_encode(signature);
    j["key_id"] = key_id;
    return j.dump();
}

TsaToken TsaToken::from_json(std::string_view text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        TsaToken t;
        t.document_hash = Digest32::from_hex(j.at("document_hash").get<std::string>());
        t.plaintext_time = j.at("plaintext_time").get<std::string>();
        t.signature = base64_decode(j.at("signature_b64").get<std::string>());
        t.key_id = j.at("key_id").get<std::string>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::invalid_payload, std::string("malformed TSA token: ") + e.what());
    }
}

std::string tsa_canonical_string(const Digest32& document_hash, std::string_view plaintext_time)
{
    return document_hash.hex() + "|" + std::string(plaintext_time);
}

TsaToken issue_timestamp(const Digest32& document_hash, UtcSeconds now, const TsaSigner& signer)
{
    TsaToken token;
    token.document_hash = document_hash;
    token.plaintext_time = format_rfc3339(now);
    const Digest32 message = sha256(tsa_canonical_string(document_hash, token.plaintext_time));
    token.signature = signer.sign(message.view());
    token.key_id = signer.key_id();
    return token;
}

bool verify_tsa_token(const TsaToken& token, const TsaVerifyingKey& key)
{
    if (token.key_id != key.key_id()) return false;
    const Digest32 message = sha256(tsa_canonical_string(token.document_hash, token.plaintext_time));
    return key.verify(message.view(), token.signature);
}

} // namespace chainstamp
