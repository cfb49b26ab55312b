#include "chainstamp/timeutil.hpp"

#include "chainstamp/error.hpp"

#include <cstdio>

namespace chainstamp {

using namespace std::chrono;

UtcSeconds system_now()
{
    return floor<seconds>(system_clock::now());
}

std::string format_rfc3339(UtcSeconds t)
{
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

UtcSeconds parse_rfc3339(std::string_view text)
{
    auto fail = [&]() -> Error {
        return Error(ErrorCode::invalid_payload, "not an RFC 3339 UTC time: '" + std::string(text) + "'");
    };
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z')
        throw fail();
    auto field = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') throw fail();
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    const year_month_day ymd{year{field(0, 4)}, month{static_cast<unsigned>(field(5, 2))},
                             day{static_cast<unsigned>(field(8, 2))}};
    const int h = field(11, 2), m = field(14, 2), s = field(17, 2);
    if (!ymd.ok() || h > 23 || m > 59 || s > 59) throw fail();
    return sys_days{ymd} + hours{h} + minutes{m} + seconds{s};
}

} // namespace chainstamp
