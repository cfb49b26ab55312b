#pragma once

#include "chainstamp/digest.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace chainstamp {

inline constexpr std::uint8_t kMainnetP2pkh = 0x00;
inline constexpr std::uint8_t kTestnetP2pkh = 0x6f;

struct BitcoinAddress {
    std::uint8_t version = kMainnetP2pkh;
    Digest20 payload;
    std::string encoded;

    friend bool operator==(const BitcoinAddress&, const BitcoinAddress&) = default;
};

/// The aggregated hash takes the public-key slot of the P2PKH pipeline:
/// payload = hash160(aggregated). Nobody holds a key for the result, so the
/// dust sent there is burned.
BitcoinAddress derive_address(const Digest32& aggregated, std::uint8_t version = kMainnetP2pkh);

/// Decodes a P2PKH-shaped address (20-byte payload). Throws
/// Error{invalid_address} on any Base58Check failure or a wrong payload size.
BitcoinAddress parse_address(std::string_view encoded);

} // namespace chainstamp
