#pragma once

// Centralized timestamp authority for contrast with chain commitment: the
// authority joins a digest with a plain-text time, hashes the result and
// signs it. Anyone holding the private key can mint valid-looking tokens.

#include "chainstamp/digest.hpp"
#include "chainstamp/timeutil.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace chainstamp {

struct TsaToken {
    Digest32 document_hash;
    std::string plaintext_time;
    Bytes signature;
    std::string key_id;

    /// {"document_hash","plaintext_time","signature_b64","key_id"}
    std::string to_json() const;
    static TsaToken from_json(std::string_view text);

    friend bool operator==(const TsaToken&, const TsaToken&) = default;
};

class TsaSigner {
public:
    virtual ~TsaSigner() = default;
    virtual Bytes sign(ByteView message) const = 0;
    virtual std::string key_id() const = 0;
};

class TsaVerifyingKey {
public:
    virtual ~TsaVerifyingKey() = default;
    virtual bool verify(ByteView message, ByteView signature) const = 0;
    virtual std::string key_id() const = 0;
};

class Ed25519PublicKey final : public TsaVerifyingKey {
public:
    static Ed25519PublicKey from_bytes(ByteView raw);

    bool verify(ByteView message, ByteView signature) const override;
    std::string key_id() const override;
    const Bytes& raw() const noexcept { return raw_; }

private:
    explicit Ed25519PublicKey(Bytes raw) : raw_(std::move(raw)) {}
    Bytes raw_;
};

class Ed25519Signer final : public TsaSigner {
public:
    static Ed25519Signer generate();
    static Ed25519Signer from_private_bytes(ByteView seed);

    Bytes sign(ByteView message) const override;
    std::string key_id() const override;

    Ed25519PublicKey public_key() const;
    /// The 32-byte seed. Exposed to model a leaked authority key.
    Bytes private_bytes() const;

private:
    explicit Ed25519Signer(Bytes seed);
    Bytes seed_;
    Bytes public_raw_;
};

std::string base64_encode(ByteView data);
/// Throws Error{invalid_payload} on malformed input.
Bytes base64_decode(std::string_view text);

/// lowercase-hex(digest) + "|" + RFC 3339 UTC time
std::string tsa_canonical_string(const Digest32& document_hash, std::string_view plaintext_time);

/// Throws Error{signing_failure} when the signer fails.
TsaToken issue_timestamp(const Digest32& document_hash, UtcSeconds now, const TsaSigner& signer);

bool verify_tsa_token(const TsaToken& token, const TsaVerifyingKey& key);

} // namespace chainstamp
