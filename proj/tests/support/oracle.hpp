#pragma once

// Independent reference implementations for tests. Everything here goes
// through OpenSSL and shares no code with the library under test.

#include <openssl/bn.h>
#include <openssl/evp.h>
#include <openssl/provider.h>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

using Bytes = std::vector<std::uint8_t>;

inline std::string hex(const Bytes& b)
{
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (auto c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

inline Bytes digest(const char* name, const std::uint8_t* data, std::size_t len)
{
    // RIPEMD-160 lives in the legacy provider on OpenSSL 3.0.
    static OSSL_PROVIDER* legacy = OSSL_PROVIDER_load(nullptr, "legacy");
    static OSSL_PROVIDER* deflt = OSSL_PROVIDER_load(nullptr, "default");
    (void)legacy;
    (void)deflt;
    EVP_MD* md = EVP_MD_fetch(nullptr, name, nullptr);
    if (!md) throw std::runtime_error(std::string("oracle: digest unavailable: ") + name);
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned int n = 0;
    EVP_Digest(data, len, out.data(), &n, md, nullptr);
    EVP_MD_free(md);
    out.resize(n);
    return out;
}

inline Bytes sha256(const Bytes& b) { return digest("SHA256", b.data(), b.size()); }
inline Bytes ripemd160(const Bytes& b) { return digest("RIPEMD160", b.data(), b.size()); }
inline Bytes sha256(std::string_view s)
{
    return digest("SHA256", reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}
inline Bytes ripemd160(std::string_view s)
{
    return digest("RIPEMD160", reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
}

inline std::string base58check(std::uint8_t version, const Bytes& payload)
{
    static const char* alphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
    Bytes body{version};
    body.insert(body.end(), payload.begin(), payload.end());
    const Bytes check = sha256(sha256(body));
    body.insert(body.end(), check.begin(), check.begin() + 4);

    BIGNUM* n = BN_bin2bn(body.data(), static_cast<int>(body.size()), nullptr);
    std::string out;
    while (!BN_is_zero(n)) out.push_back(alphabet[BN_div_word(n, 58)]);
    BN_free(n);
    for (auto b : body) {
        if (b != 0) break;
        out.push_back('1');
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace oracle
