#include "chainstamp/base58.hpp"

#include "chainstamp/error.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace chainstamp {

namespace {

constexpr std::array<std::int8_t, 128> make_reverse_table()
{
    std::array<std::int8_t, 128> table{};
    table.fill(-1);
    for (std::size_t i = 0; i < kBase58Alphabet.size(); ++i)
        table[static_cast<std::size_t>(kBase58Alphabet[i])] = static_cast<std::int8_t>(i);
    return table;
}

constexpr auto kReverse = make_reverse_table();

} // namespace

std::string base58_encode(ByteView data)
{
    const std::size_t zeros = static_cast<std::size_t>(
        std::find_if(data.begin(), data.end(), [](std::uint8_t b) { return b != 0; }) - data.begin());

    // Base-58 digits, least significant first. log(256)/log(58) < 1.37.
    std::vector<std::uint8_t> digits;
    digits.reserve((data.size() - zeros) * 137 / 100 + 1);
    for (std::size_t i = zeros; i < data.size(); ++i) {
        std::uint32_t carry = data[i];
        for (auto& digit : digits) {
            carry += std::uint32_t{digit} << 8;
            digit = static_cast<std::uint8_t>(carry % 58);
            carry /= 58;
        }
        while (carry > 0) {
            digits.push_back(static_cast<std::uint8_t>(carry % 58));
            carry /= 58;
        }
    }

    std::string out(zeros, '1');
    out.reserve(zeros + digits.size());
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) out.push_back(kBase58Alphabet[*it]);
    return out;
}

Bytes base58_decode(std::string_view text)
{
    std::size_t ones = 0;
    while (ones < text.size() && text[ones] == '1') ++ones;

    // Base-256 bytes, least significant first.
    std::vector<std::uint8_t> bytes;
    bytes.reserve(text.size() * 733 / 1000 + 1);
    for (std::size_t i = ones; i < text.size(); ++i) {
        const auto c = static_cast<unsigned char>(text[i]);
        const int value = c < 128 ? kReverse[c] : -1;
        if (value < 0)
            throw Error(ErrorCode::invalid_character,
                        std::string("invalid base58 character '") + text[i] + "' at position " +
                            std::to_string(i));
        std::uint32_t carry = static_cast<std::uint32_t>(value);
        for (auto& byte : bytes) {
            carry += std::uint32_t{byte} * 58;
            byte = static_cast<std::uint8_t>(carry & 0xff);
            carry >>= 8;
        }
        while (carry > 0) {
            bytes.push_back(static_cast<std::uint8_t>(carry & 0xff));
            carry >>= 8;
        }
    }

    Bytes out(ones, 0);
    out.insert(out.end(), bytes.rbegin(), bytes.rend());
    return out;
}

std::string base58check_encode(std::uint8_t version, ByteView payload)
{
    if (payload.size() < kMinCheckPayload || payload.size() > kMaxCheckPayload)
        throw Error(ErrorCode::invalid_payload,
                    "base58check payload must be 1-64 bytes, got " + std::to_string(payload.size()));
    Bytes body;
    body.reserve(1 + payload.size() + 4);
    body.push_back(version);
    body.insert(body.end(), payload.begin(), payload.end());
    const Digest32 check = double_sha256(body);
    body.insert(body.end(), check.bytes.begin(), check.bytes.begin() + 4);
    return base58_encode(body);
}

VersionedPayload base58check_decode(std::string_view text)
{
    const Bytes raw = base58_decode(text);
    if (raw.size() < 1 + kMinCheckPayload + 4 || raw.size() > 1 + kMaxCheckPayload + 4)
        throw Error(ErrorCode::invalid_payload,
                    "base58check body has invalid length " + std::to_string(raw.size()));
    const std::size_t body_len = raw.size() - 4;
    const Digest32 check = double_sha256(ByteView(raw.data(), body_len));
    if (std::memcmp(check.bytes.data(), raw.data() + body_len, 4) != 0)
        throw Error(ErrorCode::checksum_mismatch, "base58check checksum mismatch");
    return {raw[0], Bytes(raw.begin() + 1, raw.begin() + static_cast<std::ptrdiff_t>(body_len))};
}

} // namespace chainstamp
