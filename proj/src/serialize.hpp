#pragma once

#include "chainstamp/digest.hpp"
#include "chainstamp/error.hpp"

#include <cstdint>
#include <string>

namespace chainstamp::detail {

inline void put_be(Bytes& out, std::uint64_t v, int width)
{
    for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Bitcoin CompactSize.
inline void put_varint(Bytes& out, std::uint64_t v)
{
    if (v < 0xfd) {
        out.push_back(static_cast<std::uint8_t>(v));
    } else if (v <= 0xffff) {
        out.push_back(0xfd);
        for (int i = 0; i < 2; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    } else if (v <= 0xffffffff) {
        out.push_back(0xfe);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    } else {
        out.push_back(0xff);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

class Reader {
public:
    explicit Reader(ByteView data) : data_(data) {}

    bool done() const noexcept { return pos_ == data_.size(); }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

    ByteView take(std::size_t n)
    {
        if (n > remaining()) fail("truncated record");
        ByteView out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint64_t be(int width)
    {
        std::uint64_t v = 0;
        for (auto b : take(static_cast<std::size_t>(width))) v = (v << 8) | b;
        return v;
    }

    std::uint64_t varint()
    {
        const std::uint8_t tag = take(1)[0];
        int width = 0;
        std::uint64_t min = 0;
        switch (tag) {
        case 0xfd: width = 2; min = 0xfd; break;
        case 0xfe: width = 4; min = 0x10000; break;
        case 0xff: width = 8; min = 0x100000000; break;
        default: return tag;
        }
        std::uint64_t v = 0;
        auto bytes = take(static_cast<std::size_t>(width));
        for (int i = width - 1; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
        if (v < min) fail("non-canonical varint");
        return v;
    }

    [[noreturn]] static void fail(const std::string& what)
    {
        throw Error(ErrorCode::corrupt_record, what);
    }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace chainstamp::detail
