#pragma once

// Hash primitives: SHA-256, RIPEMD-160, and the Bitcoin compositions built
// on them (hash160 and double SHA-256). Digests are fixed-width value types
// that render as lowercase hex.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainstamp {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept
{
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView bytes);

/// Parses hex of any case. Throws Error{invalid_hex} on odd length or a
/// non-hex character.
Bytes from_hex(std::string_view hex);

template <std::size_t N>
struct FixedDigest {
    static constexpr std::size_t size = N;
    std::array<std::uint8_t, N> bytes{};

    ByteView view() const noexcept { return bytes; }
    std::string hex() const { return to_hex(bytes); }

    /// Requires exactly 2*N hex characters. Throws invalid_hex for a bad
    /// character, invalid_length for the wrong count.
    static FixedDigest from_hex(std::string_view hex);
    static FixedDigest from_bytes(ByteView raw);

    friend auto operator<=>(const FixedDigest&, const FixedDigest&) = default;
};

using Digest32 = FixedDigest<32>;
using Digest20 = FixedDigest<20>;

extern template struct FixedDigest<32>;
extern template struct FixedDigest<20>;

class Sha256 {
public:
    Sha256() noexcept { reset(); }

    void reset() noexcept;
    Sha256& update(ByteView data) noexcept;
    Digest32 finish() noexcept;

private:
    void compress(const std::uint8_t* block) noexcept;

    std::array<std::uint32_t, 8> state_{};
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

class Ripemd160 {
public:
    Ripemd160() noexcept { reset(); }

    void reset() noexcept;
    Ripemd160& update(ByteView data) noexcept;
    Digest20 finish() noexcept;

private:
    void compress(const std::uint8_t* block) noexcept;

    std::array<std::uint32_t, 5> state_{};
    std::array<std::uint8_t, 64> buffer_{};
    std::size_t buffered_ = 0;
    std::uint64_t total_ = 0;
};

Digest32 sha256(ByteView data) noexcept;
Digest20 ripemd160(ByteView data) noexcept;

/// RIPEMD-160(SHA-256(data)).
Digest20 hash160(ByteView data) noexcept;

/// SHA-256(SHA-256(data)).
Digest32 double_sha256(ByteView data) noexcept;

inline Digest32 sha256(std::string_view s) noexcept { return sha256(as_bytes(s)); }
inline Digest20 ripemd160(std::string_view s) noexcept { return ripemd160(as_bytes(s)); }
inline Digest20 hash160(std::string_view s) noexcept { return hash160(as_bytes(s)); }

/// Number of leading zero bits, most significant bit of byte 0 first.
unsigned leading_zero_bits(const Digest32& d) noexcept;

} // namespace chainstamp
