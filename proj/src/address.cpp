#include "chainstamp/address.hpp"

#include "chainstamp/base58.hpp"
#include "chainstamp/error.hpp"

namespace chainstamp {

BitcoinAddress derive_address(const Digest32& aggregated, std::uint8_t version)
{
    BitcoinAddress addr;
    addr.version = version;
    addr.payload = hash160(aggregated.view());
    addr.encoded = base58check_encode(version, addr.payload.view());
    return addr;
}

BitcoinAddress parse_address(std::string_view encoded)
{
    VersionedPayload decoded;
    try {
        decoded = base58check_decode(encoded);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_address, "invalid address '" + std::string(encoded) + "': " + e.what());
    }
    if (decoded.payload.size() != Digest20::size)
        throw Error(ErrorCode::invalid_address, "address payload is not 20 bytes");
    return {decoded.version, Digest20::from_bytes(decoded.payload), std::string(encoded)};
}

} // namespace chainstamp
