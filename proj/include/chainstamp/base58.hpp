#pragma once

#include "chainstamp/digest.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace chainstamp {

inline constexpr std::string_view kBase58Alphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

inline constexpr std::size_t kMinCheckPayload = 1;
inline constexpr std::size_t kMaxCheckPayload = 64;

std::string base58_encode(ByteView data);

/// Throws Error{invalid_character} for anything outside the alphabet.
Bytes base58_decode(std::string_view text);

struct VersionedPayload {
    std::uint8_t version = 0;
    Bytes payload;

    friend bool operator==(const VersionedPayload&, const VersionedPayload&) = default;
};

/// Base58(version || payload || dsha256(version || payload)[0..4]).
/// Throws Error{invalid_payload} unless 1 <= payload.size() <= 64.
std::string base58check_encode(std::uint8_t version, ByteView payload);

/// Throws invalid_character, checksum_mismatch, or invalid_payload (decoded
/// body too short or too long).
VersionedPayload base58check_decode(std::string_view text);

} // namespace chainstamp
