#include "chainstamp/digest.hpp"

#include "chainstamp/error.hpp"

#include <bit>
#include <cstring>

namespace chainstamp {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) noexcept
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::uint32_t load_be32(const std::uint8_t* p) noexcept
{
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

std::uint32_t load_le32(const std::uint8_t* p) noexcept
{
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
           (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

constexpr std::array<std::uint32_t, 64> kSha256Round = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
};

// RIPEMD-160 message word selection and rotation amounts, left and right lines.
constexpr std::uint8_t kRmdWordL[80] = {
    0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15,
    7, 4, 13, 1, 10, 6, 15, 3, 12, 0, 9, 5, 2, 14, 11, 8,
    3, 10, 14, 4, 9, 15, 8, 1, 2, 7, 0, 6, 13, 11, 5, 12,
    1, 9, 11, 10, 0, 8, 12, 4, 13, 3, 7, 15, 14, 5, 6, 2,
    4, 0, 5, 9, 7, 12, 2, 10, 14, 1, 3, 8, 11, 6, 15, 13};
constexpr std::uint8_t kRmdWordR[80] = {
    5, 14, 7, 0, 9, 2, 11, 4, 13, 6, 15, 8, 1, 10, 3, 12,
    6, 11, 3, 7, 0, 13, 5, 10, 14, 15, 8, 12, 4, 9, 1, 2,
    15, 5, 1, 3, 7, 14, 6, 9, 11, 8, 12, 2, 10, 0, 4, 13,
    8, 6, 4, 1, 3, 11, 15, 0, 5, 12, 2, 13, 9, 7, 10, 14,
    12, 15, 10, 4, 1, 5, 8, 7, 6, 2, 13, 14, 0, 3, 9, 11};
constexpr std::uint8_t kRmdRotL[80] = {
    11, 14, 15, 12, 5, 8, 7, 9, 11, 13, 14, 15, 6, 7, 9, 8,
    7, 6, 8, 13, 11, 9, 7, 15, 7, 12, 15, 9, 11, 7, 13, 12,
    11, 13, 6, 7, 14, 9, 13, 15, 14, 8, 13, 6, 5, 12, 7, 5,
    11, 12, 14, 15, 14, 15, 9, 8, 9, 14, 5, 6, 8, 6, 5, 12,
    9, 15, 5, 11, 6, 8, 13, 12, 5, 12, 13, 14, 11, 8, 5, 6};
constexpr std::uint8_t kRmdRotR[80] = {
    8, 9, 9, 11, 13, 15, 15, 5, 7, 7, 8, 11, 14, 14, 12, 6,
    9, 13, 15, 7, 12, 8, 9, 11, 7, 7, 12, 7, 6, 15, 13, 11,
    9, 7, 15, 11, 8, 6, 6, 14, 12, 13, 5, 14, 13, 13, 7, 5,
    15, 5, 8, 11, 14, 14, 6, 14, 6, 9, 12, 9, 12, 5, 15, 8,
    8, 5, 12, 9, 12, 5, 14, 6, 8, 13, 6, 5, 15, 13, 11, 11};
constexpr std::uint32_t kRmdConstL[5] = {0x00000000, 0x5a827999, 0x6ed9eba1, 0x8f1bbcdc, 0xa953fd4e};
constexpr std::uint32_t kRmdConstR[5] = {0x50a28be6, 0x5c4dd124, 0x6d703ef3, 0x7a6d76e9, 0x00000000};

std::uint32_t rmd_f(unsigned round, std::uint32_t x, std::uint32_t y, std::uint32_t z) noexcept
{
    switch (round) {
    case 0: return x ^ y ^ z;
    case 1: return (x & y) | (~x & z);
    case 2: return (x | ~y) ^ z;
    case 3: return (x & z) | (y & ~z);
    default: return x ^ (y | ~z);
    }
}

// Shared Merkle-Damgard buffering for the two 64-byte-block hashes.
template <typename Compress>
void absorb(ByteView data, std::array<std::uint8_t, 64>& buffer, std::size_t& buffered,
            std::uint64_t& total, Compress&& compress)
{
    const std::uint8_t* p = data.data();
    std::size_t len = data.size();
    total += len;
    if (buffered > 0) {
        const std::size_t take = std::min(len, 64 - buffered);
        std::memcpy(buffer.data() + buffered, p, take);
        buffered += take;
        p += take;
        len -= take;
        if (buffered < 64) return;
        compress(buffer.data());
        buffered = 0;
    }
    while (len >= 64) {
        compress(p);
        p += 64;
        len -= 64;
    }
    if (len > 0) {
        std::memcpy(buffer.data(), p, len);
        buffered = len;
    }
}

} // namespace

std::string to_hex(ByteView bytes)
{
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        throw Error(ErrorCode::invalid_hex, "hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw Error(ErrorCode::invalid_hex, "non-hex character in input");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

template <std::size_t N>
FixedDigest<N> FixedDigest<N>::from_hex(std::string_view hex)
{
    for (char c : hex)
        if (hex_value(c) < 0)
            throw Error(ErrorCode::invalid_hex, "non-hex character in digest");
    if (hex.size() != 2 * N)
        throw Error(ErrorCode::invalid_length,
                    "digest must be " + std::to_string(2 * N) + " hex characters, got " +
                        std::to_string(hex.size()));
    return from_bytes(chainstamp::from_hex(hex));
}

template <std::size_t N>
FixedDigest<N> FixedDigest<N>::from_bytes(ByteView raw)
{
    if (raw.size() != N)
        throw Error(ErrorCode::invalid_length,
                    "digest must be " + std::to_string(N) + " bytes, got " + std::to_string(raw.size()));
    FixedDigest d;
    std::memcpy(d.bytes.data(), raw.data(), N);
    return d;
}

template struct FixedDigest<32>;
template struct FixedDigest<20>;

// --- SHA-256 ----------------------------------------------------------------

void Sha256::reset() noexcept
{
    state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
              0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    buffered_ = 0;
    total_ = 0;
}

void Sha256::compress(const std::uint8_t* block) noexcept
{
    using std::rotr;
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) w[i] = load_be32(block + 4 * i);
    for (int i = 16; i < 64; ++i) {
        const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }

    auto [a, b, c, d, e, f, g, h] = state_;
    for (int i = 0; i < 64; ++i) {
        const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const std::uint32_t ch = (e & f) ^ (~e & g);
        const std::uint32_t t1 = h + S1 + ch + kSha256Round[i] + w[i];
        const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const std::uint32_t t2 = S0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
    state_[5] += f;
    state_[6] += g;
    state_[7] += h;
}

Sha256& Sha256::update(ByteView data) noexcept
{
    absorb(data, buffer_, buffered_, total_, [this](const std::uint8_t* b) { compress(b); });
    return *this;
}

Digest32 Sha256::finish() noexcept
{
    const std::uint64_t bit_len = total_ * 8;
    std::array<std::uint8_t, 72> pad{};
    pad[0] = 0x80;
    const std::size_t pad_len = (buffered_ < 56 ? 56 - buffered_ : 120 - buffered_);
    for (int i = 0; i < 8; ++i) pad[pad_len + i] = static_cast<std::uint8_t>(bit_len >> (56 - 8 * i));
    update(ByteView(pad.data(), pad_len + 8));

    Digest32 out;
    for (int i = 0; i < 8; ++i) {
        out.bytes[4 * i] = static_cast<std::uint8_t>(state_[i] >> 24);
        out.bytes[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 16);
        out.bytes[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 8);
        out.bytes[4 * i + 3] = static_cast<std::uint8_t>(state_[i]);
    }
    reset();
    return out;
}

// --- RIPEMD-160 -------------------------------------------------------------

void Ripemd160::reset() noexcept
{
    state_ = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476, 0xc3d2e1f0};
    buffered_ = 0;
    total_ = 0;
}

void Ripemd160::compress(const std::uint8_t* block) noexcept
{
    using std::rotl;
    std::uint32_t x[16];
    for (int i = 0; i < 16; ++i) x[i] = load_le32(block + 4 * i);

    std::uint32_t al = state_[0], bl = state_[1], cl = state_[2], dl = state_[3], el = state_[4];
    std::uint32_t ar = al, br = bl, cr = cl, dr = dl, er = el;
    for (unsigned j = 0; j < 80; ++j) {
        const unsigned round = j / 16;
        std::uint32_t t = rotl(al + rmd_f(round, bl, cl, dl) + x[kRmdWordL[j]] + kRmdConstL[round],
                               kRmdRotL[j]) + el;
        al = el;
        el = dl;
        dl = rotl(cl, 10);
        cl = bl;
        bl = t;

        t = rotl(ar + rmd_f(4 - round, br, cr, dr) + x[kRmdWordR[j]] + kRmdConstR[round],
                 kRmdRotR[j]) + er;
        ar = er;
        er = dr;
        dr = rotl(cr, 10);
        cr = br;
        br = t;
    }
    const std::uint32_t t = state_[1] + cl + dr;
    state_[1] = state_[2] + dl + er;
    state_[2] = state_[3] + el + ar;
    state_[3] = state_[4] + al + br;
    state_[4] = state_[0] + bl + cr;
    state_[0] = t;
}

Ripemd160& Ripemd160::update(ByteView data) noexcept
{
    absorb(data, buffer_, buffered_, total_, [this](const std::uint8_t* b) { compress(b); });
    return *this;
}

Digest20 Ripemd160::finish() noexcept
{
    const std::uint64_t bit_len = total_ * 8;
    std::array<std::uint8_t, 72> pad{};
    pad[0] = 0x80;
    const std::size_t pad_len = (buffered_ < 56 ? 56 - buffered_ : 120 - buffered_);
    for (int i = 0; i < 8; ++i) pad[pad_len + i] = static_cast<std::uint8_t>(bit_len >> (8 * i));
    update(ByteView(pad.data(), pad_len + 8));

    Digest20 out;
    for (int i = 0; i < 5; ++i) {
        out.bytes[4 * i] = static_cast<std::uint8_t>(state_[i]);
        out.bytes[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 8);
        out.bytes[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 16);
        out.bytes[4 * i + 3] = static_cast<std::uint8_t>(state_[i] >> 24);
    }
    reset();
    return out;
}

// --- compositions -------------------------------------------------------------

Digest32 sha256(ByteView data) noexcept
{
    return Sha256{}.update(data).finish();
}

Digest20 ripemd160(ByteView data) noexcept
{
    return Ripemd160{}.update(data).finish();
}

Digest20 hash160(ByteView data) noexcept
{
    return ripemd160(sha256(data).view());
}

Digest32 double_sha256(ByteView data) noexcept
{
    return sha256(sha256(data).view());
}

unsigned leading_zero_bits(const Digest32& d) noexcept
{
    unsigned bits = 0;
    for (auto b : d.bytes) {
        if (b == 0) {
            bits += 8;
            continue;
        }
        bits += static_cast<unsigned>(std::countl_zero(b));
        break;
    }
    return bits;
}

} // namespace chainstamp
